#include "keyape/align.hpp"

#include <limits>

#include "keyape/error.hpp"

namespace keyape {

Alignment align_human(const Sentence& mt, const AnchoredScript& script,
                      const Trace& human) {
  apply_all(mt, human);

  const auto& items = script.items();
  const Trace canonical = l2r_trace(script);
  Alignment alignment;
  alignment.rank.assign(items.size(), std::nullopt);

  std::size_t next_rank = 0;
  for (const EditAction& action : human) {
    if (action.is_stop()) break;
    std::size_t best = items.size();
    std::size_t best_distance = std::numeric_limits<std::size_t>::max();
    for (std::size_t k = 0; k < items.size(); ++k) {
      if (alignment.rank[k] || items[k].kind != action.kind ||
          items[k].token != action.token) {
        continue;
      }
      const std::size_t where = canonical[k].position;
      const std::size_t distance =
          where > action.position ? where - action.position : action.position - where;
      // Items are in canonical order, so strict < keeps the leftmost on ties.
      if (distance < best_distance) {
        best = k;
        best_distance = distance;
      }
    }
    if (best < items.size()) alignment.rank[best] = next_rank++;
  }
  alignment.status = next_rank == items.size() ? AlignmentStatus::kAligned
                                               : AlignmentStatus::kFallback;
  return alignment;
}

Trace human_ordered_trace(const AnchoredScript& script, const Alignment& alignment) {
  if (!alignment.aligned()) {
    throw Error(ErrorCode::kValidation,
                "alignment fell back; use the unfiltered human trace");
  }
  Permutation perm;
  perm.order.assign(script.size(), 0);
  for (std::size_t item = 0; item < script.size(); ++item) {
    perm.order[*alignment.rank[item]] = item;
  }
  return realize(script, perm);
}

}  // namespace keyape
