#ifndef KEYAPE_REORDER_HPP
#define KEYAPE_REORDER_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "keyape/edit.hpp"

namespace keyape {

// Seedable generator with a fixed algorithm: std::mt19937_64 (its output
// sequence is pinned by the C++ standard) plus our own bounded-integer and
// real draws, since the standard distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, bound) by rejection sampling; bound > 0.
  std::uint64_t uniform(std::uint64_t bound);
  // Uniform in [0, 1) with 53 bits of precision.
  double uniform_real();
  // Standard normal via Box-Muller.
  double normal();
  bool bernoulli(double p) { return uniform_real() < p; }

 private:
  std::mt19937_64 engine_;
};

// Derives a stream seed from a base seed and a stream index (splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Entry i is the script-item index executed at step i.
struct Permutation {
  std::vector<std::size_t> order;

  std::size_t size() const { return order.size(); }
  static Permutation identity(std::size_t n);
  // Fisher-Yates over Rng::uniform.
  static Permutation random(std::size_t n, Rng& rng);
  bool is_bijection() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;
};

// Executes the script items in `perm` order, rectifying every position to
// the current state, and appends STOP.
Trace realize(const AnchoredScript& script, const Permutation& perm);

Trace l2r_trace(const AnchoredScript& script);
Trace shuffled_trace(const AnchoredScript& script, std::uint64_t seed);

// Incremental form of realize: tracks which items are applied so the current
// position of any item can be queried.
class ScriptState {
 public:
  explicit ScriptState(const AnchoredScript& script);

  // State-relative position the item would take if executed now.
  std::size_t position_of(std::size_t item) const;
  bool applied(std::size_t item) const { return applied_[item]; }
  // Marks the item executed and returns the rectified action.
  EditAction execute(std::size_t item);
  void undo(std::size_t item) { applied_[item] = false; }

 private:
  const AnchoredScript& script_;
  std::vector<bool> applied_;
};

}  // namespace keyape

#endif  // KEYAPE_REORDER_HPP
