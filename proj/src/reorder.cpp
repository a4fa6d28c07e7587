#include "keyape/reorder.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "keyape/error.hpp"

namespace keyape {

std::uint64_t Rng::uniform(std::uint64_t bound) {
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

double Rng::uniform_real() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  double u1 = uniform_real();
  while (u1 <= 0.0) u1 = uniform_real();
  const double u2 = uniform_real();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Permutation Permutation::identity(std::size_t n) {
  Permutation p;
  p.order.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.order[i] = i;
  return p;
}

Permutation Permutation::random(std::size_t n, Rng& rng) {
  Permutation p = identity(n);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform(i));
    std::swap(p.order[i - 1], p.order[j]);
  }
  return p;
}

bool Permutation::is_bijection() const {
  std::vector<bool> seen(order.size(), false);
  for (std::size_t v : order) {
    if (v >= order.size() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

ScriptState::ScriptState(const AnchoredScript& script)
    : script_(script), applied_(script.size(), false) {}

std::size_t ScriptState::position_of(std::size_t item) const {
  const auto& items = script_.items();
  const ScriptItem& target = items[item];
  // Originals before the anchor that are still present.
  std::size_t pos = target.anchor;
  for (std::size_t k = 0; k < items.size(); ++k) {
    const ScriptItem& other = items[k];
    if (!applied_[k]) continue;
    if (other.kind == ActionKind::kDelete) {
      if (other.anchor < target.anchor) --pos;
    } else if (target.kind == ActionKind::kDelete) {
      // Insertions in gaps <= i sit before original token i.
      if (other.anchor <= target.anchor) ++pos;
    } else if (other.anchor < target.anchor ||
               (other.anchor == target.anchor && other.ordinal < target.ordinal)) {
      ++pos;
    }
  }
  return pos;
}

EditAction ScriptState::execute(std::size_t item) {
  const ScriptItem& it = script_.items()[item];
  EditAction action{it.kind, position_of(item), it.token};
  applied_[item] = true;
  return action;
}

Trace realize(const AnchoredScript& script, const Permutation& perm) {
  if (perm.size() != script.size() || !perm.is_bijection()) {
    throw Error(ErrorCode::kPermutation,
                "permutation of length " + std::to_string(perm.size()) +
                    " is not a bijection over " + std::to_string(script.size()) +
                    " script items");
  }
  ScriptState state(script);
  Trace trace;
  trace.reserve(script.size() + 1);
  for (std::size_t item : perm.order) trace.push_back(state.execute(item));
  trace.push_back(EditAction::stop());
  return trace;
}

Trace l2r_trace(const AnchoredScript& script) {
  return realize(script, Permutation::identity(script.size()));
}

Trace shuffled_trace(const AnchoredScript& script, std::uint64_t seed) {
  Rng rng(seed);
  return realize(script, Permutation::random(script.size(), rng));
}

}  // namespace keyape
