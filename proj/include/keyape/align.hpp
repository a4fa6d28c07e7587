#ifndef KEYAPE_ALIGN_HPP
#define KEYAPE_ALIGN_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "keyape/edit.hpp"
#include "keyape/reorder.hpp"

namespace keyape {

enum class AlignmentStatus { kAligned, kFallback };

struct Alignment {
  AlignmentStatus status = AlignmentStatus::kFallback;
  // rank[item] = execution rank of script item `item`; nullopt for items no
  // human action claimed (only possible under kFallback).
  std::vector<std::optional<std::size_t>> rank;

  bool aligned() const { return status == AlignmentStatus::kAligned; }
};

// Matches human actions to minimal-script items in one greedy pass over the
// human trace. A human action may claim one unclaimed item of the same kind
// and token; among several, the item whose canonical left-to-right position
// is closest to the human action's position wins, then the leftmost item.
// Human actions that claim nothing (hesitations, redundant pairs) are
// skipped. Any unclaimed item turns the result into kFallback.
//
// `human` must turn `mt` into the script's target; a trace that fails to
// apply propagates its TraceError.
Alignment align_human(const Sentence& mt, const AnchoredScript& script,
                      const Trace& human);

// Realizes the script in the aligned human order. Throws Error(kValidation)
// for a fallback alignment: the caller keeps the unfiltered trace instead.
Trace human_ordered_trace(const AnchoredScript& script, const Alignment& alignment);

}  // namespace keyape

#endif  // KEYAPE_ALIGN_HPP
