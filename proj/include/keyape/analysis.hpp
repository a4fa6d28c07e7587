#ifndef KEYAPE_ANALYSIS_HPP
#define KEYAPE_ANALYSIS_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "keyape/decode_result.hpp"
#include "keyape/edit.hpp"
#include "keyape/reorder.hpp"

namespace keyape {

// Execution step -> script item index (items are in canonical left-to-right
// order, so the index is the item's left-to-right rank). Throws
// Error(kMismatch) when `trace` is not a realization of `script`. STOP is
// ignored.
Permutation order_permutation(const Trace& trace, const AnchoredScript& script);

// Non-throwing variant for traces that may carry redundant actions.
std::optional<Permutation> try_order_permutation(const Trace& trace,
                                                 const AnchoredScript& script);

// Discordant pairs / C(n, 2); 0 for n < 2.
double kendall_tau_distance(const Permutation& perm);

struct JumpBackCounts {
  std::size_t actions = 0;
  std::size_t jump_backs = 0;
  // threshold k -> jump-backs of at least k positions.
  std::map<std::size_t, std::size_t> at_least;
};

// An action at position p after an action at q jumps back iff p < q. STOP is
// not an action here.
JumpBackCounts jump_back_stats(const Trace& trace, std::span<const std::size_t> thresholds);

struct OrderingStats {
  double kendall_tau = 0.0;
  double jump_back_rate = 0.0;
  std::map<std::size_t, double> jump_back_ge;
  std::size_t n_actions = 0;
  std::size_t n_traces = 0;
  // Traces that entered the mean tau (realizations with >= 2 actions).
  std::size_t n_tau = 0;
};

// Corpus statistics. Jump-back rates pool all actions; tau is the mean over
// traces that realize the minimal script of (mt, apply_all(mt, trace)) and
// have at least two actions.
OrderingStats ordering_stats(std::span<const Sentence> mts, std::span<const Trace> traces,
                             std::span<const std::size_t> thresholds);

struct Curve {
  std::vector<double> grid;
  std::vector<double> mean;
  std::size_t used = 0;
  std::size_t skipped = 0;
};

// Mean relative position of the executed item (perm[i] / (n - 1)) against
// relative execution time (i / (n - 1)), linearly interpolated onto
// `grid_size` evenly spaced points of [0, 1]. Permutations shorter than 2 are
// skipped. Throws Error(kEmptyCurve) when nothing is left, and
// Error(kConfiguration) for grid_size < 2.
Curve relative_curve(std::span<const Permutation> perms, std::size_t grid_size);

// Per word (and its POS tag in that sample), first human actions minus first
// left-to-right actions touching it; words with |difference| < min_diff are
// dropped and the rest summed per tag. Untagged words count as "UNK". Throws
// Error(kPairing) when the three spans differ in length.
std::vector<std::pair<std::string, long>> first_action_pos_diff(
    std::span<const Trace> human, std::span<const Trace> l2r,
    std::span<const std::map<std::string, std::string>> pos_tags, long min_diff = 5);

struct DecodeBehavior {
  double pct_loops = 0.0;
  double pct_do_nothing = 0.0;
  double kendall_tau = 0.0;
  // kendall_tau minus the training-order tau passed in.
  double delta_tau = 0.0;
  // Results that entered the mean tau.
  std::size_t n_tau = 0;
};

// Tau is averaged like ordering_stats: over traces with at least two actions
// that realize the minimal script of (mt, final). Throws
// Error(kPairing) when mts and results differ in length.
DecodeBehavior decode_behavior_stats(std::span<const Sentence> mts,
                                     std::span<const DecodeResult> results,
                                     double training_tau);

// CSV renderings.
std::string stats_csv(const std::vector<std::pair<std::string, OrderingStats>>& rows);
std::string curve_csv(const std::vector<std::pair<std::string, Curve>>& curves);
std::string pos_diff_csv(const std::vector<std::pair<std::string, long>>& counts);
std::string decode_stats_csv(const std::vector<std::pair<std::string, DecodeBehavior>>& rows);

}  // namespace keyape

#endif  // KEYAPE_ANALYSIS_HPP
