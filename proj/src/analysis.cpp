#include "keyape/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "keyape/error.hpp"

namespace keyape {
namespace {

bool search(const Trace& trace, std::size_t step, const AnchoredScript& script,
            ScriptState& state, std::vector<std::size_t>& order) {
  if (step == trace.size() || trace[step].is_stop()) return true;
  const EditAction& action = trace[step];
  const auto& items = script.items();
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (state.applied(k) || items[k].kind != action.kind || items[k].token != action.token ||
        state.position_of(k) != action.position) {
      continue;
    }
    state.execute(k);
    order.push_back(k);
    if (search(trace, step + 1, script, state, order)) return true;
    order.pop_back();
    state.undo(k);
  }
  return false;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::optional<Permutation> try_order_permutation(const Trace& trace,
                                                 const AnchoredScript& script) {
  if (action_count(trace) != script.size()) return std::nullopt;
  ScriptState state(script);
  Permutation perm;
  if (!search(trace, 0, script, state, perm.order)) return std::nullopt;
  return perm;
}

Permutation order_permutation(const Trace& trace, const AnchoredScript& script) {
  std::optional<Permutation> perm = try_order_permutation(trace, script);
  if (!perm) {
    throw Error(ErrorCode::kMismatch, "trace is not a realization of the script");
  }
  return *perm;
}

double kendall_tau_distance(const Permutation& perm) {
  const std::size_t n = perm.size();
  if (n < 2) return 0.0;
  std::size_t discordant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (perm.order[i] > perm.order[j]) ++discordant;
    }
  }
  return static_cast<double>(discordant) / (static_cast<double>(n) * (n - 1) / 2.0);
}

JumpBackCounts jump_back_stats(const Trace& trace, std::span<const std::size_t> thresholds) {
  JumpBackCounts counts;
  for (std::size_t k : thresholds) counts.at_least[k] = 0;
  const EditAction* previous = nullptr;
  for (const EditAction& action : trace) {
    if (action.is_stop()) continue;
    ++counts.actions;
    if (previous && action.position < previous->position) {
      ++counts.jump_backs;
      const std::size_t jump = previous->position - action.position;
      for (auto& [k, n] : counts.at_least) {
        if (jump >= k) ++n;
      }
    }
    previous = &action;
  }
  return counts;
}

OrderingStats ordering_stats(std::span<const Sentence> mts, std::span<const Trace> traces,
                             std::span<const std::size_t> thresholds) {
  if (mts.size() != traces.size()) {
    throw Error(ErrorCode::kPairing, "mt and trace counts differ");
  }
  OrderingStats stats;
  stats.n_traces = traces.size();
  std::size_t jumps = 0;
  std::map<std::size_t, std::size_t> at_least;
  double tau_sum = 0.0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const JumpBackCounts c = jump_back_stats(traces[i], thresholds);
    stats.n_actions += c.actions;
    jumps += c.jump_backs;
    for (const auto& [k, n] : c.at_least) at_least[k] += n;
    if (c.actions < 2) continue;
    const AnchoredScript script = min_edit_script(mts[i], apply_all(mts[i], traces[i]));
    if (const auto perm = try_order_permutation(traces[i], script)) {
      tau_sum += kendall_tau_distance(*perm);
      ++stats.n_tau;
    }
  }
  const double actions = static_cast<double>(std::max<std::size_t>(stats.n_actions, 1));
  stats.jump_back_rate = static_cast<double>(jumps) / actions;
  for (std::size_t k : thresholds) {
    stats.jump_back_ge[k] = static_cast<double>(at_least[k]) / actions;
  }
  stats.kendall_tau = stats.n_tau ? tau_sum / static_cast<double>(stats.n_tau) : 0.0;
  return stats;
}

Curve relative_curve(std::span<const Permutation> perms, std::size_t grid_size) {
  if (grid_size < 2) throw Error(ErrorCode::kConfiguration, "curve grid needs >= 2 points");
  Curve curve;
  curve.grid.resize(grid_size);
  curve.mean.assign(grid_size, 0.0);
  for (std::size_t g = 0; g < grid_size; ++g) {
    curve.grid[g] = static_cast<double>(g) / static_cast<double>(grid_size - 1);
  }
  for (const Permutation& perm : perms) {
    const std::size_t n = perm.size();
    if (n < 2) {
      ++curve.skipped;
      continue;
    }
    const double last = static_cast<double>(n - 1);
    for (std::size_t g = 0; g < grid_size; ++g) {
      const double t = curve.grid[g] * last;
      const auto i = std::min(static_cast<std::size_t>(t), n - 2);
      const double frac = t - static_cast<double>(i);
      const double y0 = static_cast<double>(perm.order[i]) / last;
      const double y1 = static_cast<double>(perm.order[i + 1]) / last;
      curve.mean[g] += y0 + (y1 - y0) * frac;
    }
    ++curve.used;
  }
  if (curve.used == 0) {
    throw Error(ErrorCode::kEmptyCurve, "no trace with at least two actions");
  }
  for (double& y : curve.mean) y /= static_cast<double>(curve.used);
  return curve;
}

std::vector<std::pair<std::string, long>> first_action_pos_diff(
    std::span<const Trace> human, std::span<const Trace> l2r,
    std::span<const std::map<std::string, std::string>> pos_tags, long min_diff) {
  if (human.size() != l2r.size() || human.size() != pos_tags.size()) {
    throw Error(ErrorCode::kPairing, "human, l2r and POS inputs differ in length");
  }
  std::map<std::pair<std::string, std::string>, long> per_word;
  auto tally = [&](const Trace& trace, const std::map<std::string, std::string>& tags,
                   long sign) {
    if (trace.empty() || trace.front().is_stop()) return;
    const std::string& word = trace.front().token;
    const auto it = tags.find(word);
    per_word[{word, it == tags.end() ? "UNK" : it->second}] += sign;
  };
  for (std::size_t i = 0; i < human.size(); ++i) {
    tally(human[i], pos_tags[i], +1);
    tally(l2r[i], pos_tags[i], -1);
  }
  std::map<std::string, long> per_tag;
  for (const auto& [key, diff] : per_word) {
    if (std::labs(diff) < min_diff || diff == 0) continue;
    per_tag[key.second] += diff;
  }
  return {per_tag.begin(), per_tag.end()};
}

DecodeBehavior decode_behavior_stats(std::span<const Sentence> mts,
                                     std::span<const DecodeResult> results,
                                     double training_tau) {
  if (mts.size() != results.size()) {
    throw Error(ErrorCode::kPairing, "mt and decode result counts differ");
  }
  DecodeBehavior behavior;
  if (results.empty()) return behavior;
  std::size_t loops = 0;
  std::size_t do_nothing = 0;
  double tau_sum = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const DecodeResult& r = results[i];
    if (r.stop_reason == StopReason::kLoop) ++loops;
    if (!r.trace.empty() && r.trace.front().is_stop()) ++do_nothing;
    if (action_count(r.trace) < 2) continue;
    const AnchoredScript script = min_edit_script(mts[i], r.final);
    if (const auto perm = try_order_permutation(r.trace, script)) {
      tau_sum += kendall_tau_distance(*perm);
      ++behavior.n_tau;
    }
  }
  const double n = static_cast<double>(results.size());
  behavior.pct_loops = 100.0 * static_cast<double>(loops) / n;
  behavior.pct_do_nothing = 100.0 * static_cast<double>(do_nothing) / n;
  behavior.kendall_tau =
      behavior.n_tau ? tau_sum / static_cast<double>(behavior.n_tau) : 0.0;
  behavior.delta_tau = behavior.kendall_tau - training_tau;
  return behavior;
}

std::string stats_csv(const std::vector<std::pair<std::string, OrderingStats>>& rows) {
  std::set<std::size_t> thresholds;
  for (const auto& [_, s] : rows) {
    for (const auto& [k, __] : s.jump_back_ge) thresholds.insert(k);
  }
  std::string out = "mode,jump_back";
  for (std::size_t k : thresholds) out += ",jb_ge" + std::to_string(k);
  out += ",kendall_tau,n_actions,n_traces\n";
  for (const auto& [mode, s] : rows) {
    out += mode + "," + fmt(s.jump_back_rate);
    for (std::size_t k : thresholds) {
      const auto it = s.jump_back_ge.find(k);
      out += "," + fmt(it == s.jump_back_ge.end() ? 0.0 : it->second);
    }
    out += "," + fmt(s.kendall_tau) + "," + std::to_string(s.n_actions) + "," +
           std::to_string(s.n_traces) + "\n";
  }
  return out;
}

std::string curve_csv(const std::vector<std::pair<std::string, Curve>>& curves) {
  std::string out = "grid";
  for (const auto& [mode, _] : curves) out += "," + mode;
  out += "\n";
  if (curves.empty()) return out;
  const std::vector<double>& grid = curves.front().second.grid;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    out += fmt(grid[g]);
    for (const auto& [_, c] : curves) out += "," + fmt(c.mean.at(g));
    out += "\n";
  }
  return out;
}

std::string pos_diff_csv(const std::vector<std::pair<std::string, long>>& counts) {
  std::string out = "tag,count\n";
  for (const auto& [tag, n] : counts) out += tag + "," + std::to_string(n) + "\n";
  return out;
}

std::string decode_stats_csv(const std::vector<std::pair<std::string, DecodeBehavior>>& rows) {
  std::string out = "mode,kendall_tau,delta_tau,pct_loops,pct_do_nothing\n";
  for (const auto& [mode, b] : rows) {
    out += mode + "," + fmt(b.kendall_tau) + "," + fmt(b.delta_tau) + "," +
           fmt(b.pct_loops) + "," + fmt(b.pct_do_nothing) + "\n";
  }
  return out;
}

}  // namespace keyape
