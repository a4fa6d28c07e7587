// keyape: command-line front end for post-edit ordering experiments.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "keyape/align.hpp"
#include "keyape/analysis.hpp"
#include "keyape/corpus.hpp"
#include "keyape/edit.hpp"
#include "keyape/error.hpp"
#include "keyape/io.hpp"
#include "keyape/keystrokes.hpp"
#include "keyape/metrics.hpp"
#include "keyape/model.hpp"
#include "keyape/reorder.hpp"
#include "keyape/synthetic.hpp"
#include "keyape/trainer.hpp"

namespace {

using nlohmann::json;
using namespace keyape;

enum Exit { kOk = 0, kInternal = 1, kUsage = 2, kIoFailure = 3, kBadData = 4, kModelFailure = 5 };

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfiguration:
      return kUsage;
    case ErrorCode::kIo:
      return kIoFailure;
    case ErrorCode::kLength:
    case ErrorCode::kImpossibleState:
    case ErrorCode::kNonFinite:
      return kModelFailure;
    default:
      return kBadData;
  }
}

void log_event(const json& event) { std::cerr << event.dump() << "\n" << std::flush; }

// ---- file formats --------------------------------------------------------

std::string script_line(const std::string& id, const AnchoredScript& script) {
  json items = json::array();
  for (const ScriptItem& item : script.items()) {
    items.push_back({{"kind", item.kind == ActionKind::kDelete ? "DEL" : "INS"},
                     {"anchor", item.anchor},
                     {"ordinal", item.ordinal},
                     {"token", item.token}});
  }
  return json{{"id", id}, {"size", script.size()}, {"items", std::move(items)}}.dump();
}

std::string decoded_line(const std::string& id, const std::string& label,
                         const DecodeResult& r) {
  return json{{"id", id},
              {"label", label},
              {"trace", format_trace(r.trace)},
              {"final", detokenize(r.final)},
              {"stop_reason", std::string(to_string(r.stop_reason))},
              {"steps", r.steps}}
      .dump();
}

struct DecodedFile {
  std::string label;
  std::vector<std::string> ids;
  std::vector<DecodeResult> results;
};

StopReason parse_stop_reason(const std::string& text) {
  if (text == "STOP") return StopReason::kStop;
  if (text == "LOOP") return StopReason::kLoop;
  if (text == "CAP") return StopReason::kCap;
  throw Error(ErrorCode::kParse, "unknown stop reason '" + text + "'");
}

DecodedFile load_decoded(const std::string& path) {
  DecodedFile out;
  const std::vector<std::string> lines = read_lines(path);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (lines[n].find_first_not_of(" \t") == std::string::npos) continue;
    try {
      const json j = json::parse(lines[n]);
      DecodeResult r;
      r.trace = parse_trace(j.at("trace").get<std::string>());
      r.final = tokenize(j.at("final").get<std::string>());
      r.stop_reason = parse_stop_reason(j.at("stop_reason").get<std::string>());
      r.steps = j.at("steps").get<std::size_t>();
      out.label = j.value("label", "decoded");
      out.ids.push_back(j.at("id").get<std::string>());
      out.results.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse,
                  path + ": line " + std::to_string(n + 1) + ": " + e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kIo) throw;
      throw Error(ErrorCode::kParse,
                  path + ": line " + std::to_string(n + 1) + ": " + e.what());
    }
  }
  return out;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const std::string& line : lines) out += line + "\n";
  return out;
}

class SampleIndex {
 public:
  explicit SampleIndex(const std::vector<Sample>& samples) : samples_(samples) {
    for (std::size_t i = 0; i < samples.size(); ++i) index_.emplace(samples[i].id, i);
  }
  const Sample& at(const std::string& id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) throw Error(ErrorCode::kPairing, "no sample with id '" + id + "'");
    return samples_[it->second];
  }

 private:
  const std::vector<Sample>& samples_;
  std::unordered_map<std::string, std::size_t> index_;
};

// ---- config file ---------------------------------------------------------

// Flat "key = value" lines; '#' starts a comment. Keys are long option names
// without dashes. Values are placed before the command-line arguments, so
// explicit flags win.
std::vector<std::string> config_arguments(const std::string& path) {
  std::vector<std::string> args;
  const std::vector<std::string> lines = read_lines(path);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    std::string line = lines[n].substr(0, lines[n].find('#'));
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      if (b == std::string::npos) return std::string();
      return s.substr(b, s.find_last_not_of(" \t") - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kConfiguration,
                  path + ": line " + std::to_string(n + 1) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    for (char& ch : key) {
      if (ch == '_') ch = '-';
    }
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

// Splices config-file arguments in right after the subcommand name.
std::vector<std::string> expand_config(const std::vector<std::string>& argv) {
  std::optional<std::string> path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < argv.size(); ++i) {
    if (argv[i] == "--config" && i + 1 < argv.size()) {
      path = argv[++i];
    } else if (argv[i].rfind("--config=", 0) == 0) {
      path = argv[i].substr(9);
    } else {
      rest.push_back(argv[i]);
    }
  }
  if (!path || rest.size() < 2) return rest;
  const std::vector<std::string> extra = config_arguments(*path);
  rest.insert(rest.begin() + 2, extra.begin(), extra.end());
  return rest;
}

json echo_options(const CLI::App& app, const std::optional<std::string>& config_path) {
  json options = json::object();
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help") continue;
    if (opt->get_expected_min() == 0) {
      options[name] = opt->count() > 0 && opt->as<bool>();
    } else if (opt->get_items_expected_max() > 1 && opt->count() > 0) {
      options[name] = opt->results();
    } else if (opt->count() > 0) {
      options[name] = opt->results().back();
    } else {
      options[name] = opt->get_default_str();
    }
  }
  if (config_path) options["config"] = *config_path;
  return options;
}

// ---- subcommands ---------------------------------------------------------

struct Paths {
  std::string in, out;
};

void run_extract(const Paths& p) {
  const std::vector<Sample> samples = load_samples(p.in);
  std::vector<std::string> lines;
  for (const Sample& s : samples) lines.push_back(script_line(s.id, min_edit_script(s.mt, s.pe)));
  write_file_atomic(p.out, join_lines(lines));
  log_event({{"event", "extract"}, {"samples", samples.size()}});
}

void report_dataset(const char* what, const OrderedDataset& d) {
  log_event({{"event", what},
             {"entries", d.entries.size()},
             {"excluded", d.excluded},
             {"fallback_rate", d.fallback_rate()}});
}

void run_ordering(const Paths& p, OrderingMode mode, std::uint64_t seed, const char* what) {
  const std::vector<Sample> samples = load_samples(p.in);
  const OrderedDataset d = build_training_set(samples, mode, seed);
  save_dataset(p.out, d);
  report_dataset(what, d);
}

struct SynthOptions {
  CorpusOptions corpus;
  std::string out, human_out;
};

void run_synth(const SynthOptions& o) {
  const SyntheticCorpus c = synthetic_corpus(o.corpus);
  save_samples(o.out, c.samples);
  if (!o.human_out.empty()) {
    OrderedDataset d;
    d.seed = o.corpus.seed;
    for (std::size_t i = 0; i < c.samples.size(); ++i) {
      d.entries.push_back({c.samples[i].id, OrderingMode::kHumanUnfiltered, c.human[i], false});
    }
    save_dataset(o.human_out, d);
  }
  std::size_t injected = 0;
  for (bool b : c.injected) injected += b ? 1 : 0;
  log_event({{"event", "synth"}, {"samples", c.samples.size()}, {"injected", injected}});
}

struct AnalyzeOptions {
  std::string samples;
  std::vector<std::string> traces, decoded;
  std::string out_dir;
  std::size_t grid_size = 100;
  long min_diff = 5;
  std::vector<std::size_t> thresholds{4};
};

void run_analyze(const AnalyzeOptions& o) {
  const std::vector<Sample> samples = load_samples(o.samples);
  const SampleIndex index(samples);
  std::filesystem::create_directories(o.out_dir);
  const auto out = [&](const char* name) {
    return (std::filesystem::path(o.out_dir) / name).string();
  };

  std::vector<std::pair<std::string, OrderingStats>> stats;
  std::vector<std::pair<std::string, Curve>> curves;
  std::map<std::string, double> training_tau;
  bool pos_done = false;
  for (const std::string& path : o.traces) {
    const OrderedDataset d = load_dataset(path);
    if (d.entries.empty()) throw Error(ErrorCode::kValidation, path + ": no entries");
    const std::string label(to_string(d.entries.front().mode));
    std::vector<Sentence> mts;
    std::vector<Trace> traces;
    std::vector<Permutation> perms;
    for (const OrderedEntry& e : d.entries) {
      const Sample& s = index.at(e.id);
      mts.push_back(s.mt);
      traces.push_back(e.trace);
      const AnchoredScript script = min_edit_script(s.mt, apply_all(s.mt, e.trace));
      if (auto perm = try_order_permutation(e.trace, script)) perms.push_back(std::move(*perm));
    }
    const OrderingStats st = ordering_stats(mts, traces, o.thresholds);
    stats.emplace_back(label, st);
    training_tau.emplace(label, st.kendall_tau);
    try {
      curves.emplace_back(label, relative_curve(perms, o.grid_size));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyCurve) throw;
      log_event({{"event", "warning"}, {"message", label + ": " + e.what()}});
    }

    const OrderingMode mode = d.entries.front().mode;
    if (!pos_done &&
        (mode == OrderingMode::kHumanOrdered || mode == OrderingMode::kHumanUnfiltered)) {
      std::vector<Trace> l2r;
      std::vector<std::map<std::string, std::string>> tags;
      for (const OrderedEntry& e : d.entries) {
        const Sample& s = index.at(e.id);
        l2r.push_back(l2r_trace(min_edit_script(s.mt, s.pe)));
        tags.push_back(s.pos_tags);
      }
      write_file_atomic(out("pos_diff.csv"),
                        pos_diff_csv(first_action_pos_diff(traces, l2r, tags, o.min_diff)));
      pos_done = true;
    }
  }
  if (!stats.empty()) write_file_atomic(out("stats.csv"), stats_csv(stats));
  if (!curves.empty()) write_file_atomic(out("curve.csv"), curve_csv(curves));

  std::vector<std::pair<std::string, DecodeBehavior>> behaviors;
  for (const std::string& path : o.decoded) {
    const DecodedFile f = load_decoded(path);
    std::vector<Sentence> mts;
    for (const std::string& id : f.ids) mts.push_back(index.at(id).mt);
    const auto it = training_tau.find(f.label);
    behaviors.emplace_back(f.label, decode_behavior_stats(mts, f.results,
                                                          it == training_tau.end() ? 0.0
                                                                                   : it->second));
  }
  if (!behaviors.empty()) write_file_atomic(out("decode_stats.csv"), decode_stats_csv(behaviors));
  log_event({{"event", "analyze"},
             {"trace_files", o.traces.size()},
             {"decoded_files", o.decoded.size()},
             {"out_dir", o.out_dir}});
}

struct TrainOptions {
  std::string samples, traces, dev, out, last_out, log, checkpoint_dir;
  double stop_at_exact_match = 0.0;
  TrainConfig config;
};

void run_train(const TrainOptions& o) {
  const std::vector<Sample> samples = load_samples(o.samples);
  const OrderedDataset dataset = load_dataset(o.traces);
  const std::vector<Sample> dev = o.dev.empty() ? std::vector<Sample>{} : load_samples(o.dev);
  if (!o.checkpoint_dir.empty()) std::filesystem::create_directories(o.checkpoint_dir);
  // Exact match is measured on the dev set, or on the training samples when
  // there is none.
  const std::vector<Sample>& probe = dev.empty() ? samples : dev;

  const TrainResult r = train(
      samples, dataset, o.config, dev, [&](const Checkpoint& c, const LogRow& row) {
        json event = {{"event", "checkpoint"},
                      {"step", row.step},
                      {"lr", row.lr},
                      {"loss", row.loss},
                      {"dev_ter", row.dev_ter}};
        bool keep_going = true;
        if (o.stop_at_exact_match > 0.0) {
          const double em = exact_match_rate(
              probe, decode_all(c, probe, {c.config.max_decode_actions, false}));
          event["exact_match"] = em;
          keep_going = em < o.stop_at_exact_match;
        }
        if (!o.checkpoint_dir.empty()) {
          const std::string path =
              (std::filesystem::path(o.checkpoint_dir) /
               ("checkpoint-" + std::to_string(row.step) + ".json"))
                  .string();
          save_checkpoint(path, c);
          event["path"] = path;
        }
        log_event(event);
        return keep_going;
      });
  save_checkpoint(o.out, r.best);
  if (!o.last_out.empty()) save_checkpoint(o.last_out, r.last);
  if (!o.log.empty()) write_file_atomic(o.log, log_csv(r.log));
  log_event({{"event", "train"},
             {"steps", r.log.size()},
             {"best_step", r.best.step},
             {"best_dev_ter", r.best_dev_ter},
             {"final_loss", r.log.empty() ? 0.0 : r.log.back().loss}});
}

struct DecodeOptions {
  Paths paths;
  std::string model, label = "decoded";
  DecodeConfig config;
};

void run_decode(const DecodeOptions& o) {
  const Checkpoint model = load_checkpoint(o.model);
  const std::vector<Sample> samples = load_samples(o.paths.in);
  const std::vector<DecodeResult> results = decode_all(model, samples, o.config);
  std::vector<std::string> lines;
  std::map<std::string, std::size_t> reasons;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    lines.push_back(decoded_line(samples[i].id, o.label, results[i]));
    ++reasons[std::string(to_string(results[i].stop_reason))];
  }
  write_file_atomic(o.paths.out, join_lines(lines));
  log_event({{"event", "decode"},
             {"samples", samples.size()},
             {"stop_reasons", reasons},
             {"exact_match", exact_match_rate(samples, results)}});
}

struct EvaluateOptions {
  std::string ref, decoded, traces, hyp_text, out, per_sentence;
  bool uncorrected = false;
  TerOptions ter;
};

void run_evaluate(const EvaluateOptions& o) {
  const std::vector<Sample> samples = load_samples(o.ref);
  const SampleIndex index(samples);
  const int sources = !o.decoded.empty() + !o.traces.empty() + !o.hyp_text.empty() +
                      (o.uncorrected ? 1 : 0);
  if (sources != 1) {
    throw Error(ErrorCode::kConfiguration,
                "give exactly one of --decoded, --traces, --hyp-text, --uncorrected");
  }
  std::vector<std::string> ids;
  std::vector<Sentence> hyps;
  if (!o.decoded.empty()) {
    const DecodedFile f = load_decoded(o.decoded);
    ids = f.ids;
    for (const DecodeResult& r : f.results) hyps.push_back(r.final);
  } else if (!o.traces.empty()) {
    for (const OrderedEntry& e : load_dataset(o.traces).entries) {
      ids.push_back(e.id);
      hyps.push_back(apply_all(index.at(e.id).mt, e.trace));
    }
  } else if (!o.hyp_text.empty()) {
    std::vector<std::string> lines = read_lines(o.hyp_text);
    if (lines.size() != samples.size()) {
      throw Error(ErrorCode::kPairing, "hypothesis and reference line counts differ");
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
      ids.push_back(samples[i].id);
      hyps.push_back(tokenize(lines[i]));
    }
  } else {
    for (const Sample& s : samples) {
      ids.push_back(s.id);
      hyps.push_back(s.mt);
    }
  }
  std::vector<Sentence> refs;
  for (const std::string& id : ids) refs.push_back(index.at(id).pe);

  const EvalReport report = evaluate(hyps, refs, o.ter);
  const std::string text = json{{"ter", report.ter},
                                {"bleu", report.bleu},
                                {"n_sentences", report.n_sentences}}
                               .dump() +
                           "\n";
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_file_atomic(o.out, text);
  }
  if (!o.per_sentence.empty()) {
    std::string csv = "id,ter,edits,ref_length\n";
    char buf[64];
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const std::size_t edits = ter_edits(hyps[i], refs[i], o.ter);
      std::snprintf(buf, sizeof buf, "%.6f", ter(hyps[i], refs[i], o.ter));
      csv += ids[i] + "," + buf + "," + std::to_string(edits) + "," +
             std::to_string(refs[i].size()) + "\n";
    }
    write_file_atomic(o.per_sentence, csv);
  }
  log_event({{"event", "evaluate"}, {"ter", report.ter}, {"bleu", report.bleu}});
}

void add_train_config(CLI::App* sub, TrainConfig& c) {
  sub->add_option("--layers", c.model.layers, "Encoder layers")->capture_default_str();
  sub->add_option("--hidden", c.model.hidden, "Hidden size")->capture_default_str();
  sub->add_option("--heads", c.model.heads, "Attention heads")->capture_default_str();
  sub->add_option("--ffn", c.model.ffn, "Feed-forward size")->capture_default_str();
  sub->add_option("--max-positions", c.model.max_positions, "Position table size")
      ->capture_default_str();
  sub->add_option("--dropout", c.model.dropout)->capture_default_str();
  sub->add_option("--peak-lr", c.peak_lr)->capture_default_str();
  sub->add_option("--warmup", c.warmup, "Warmup steps")->capture_default_str();
  sub->add_option("--total-steps", c.total_steps)->capture_default_str();
  sub->add_option("--weight-decay", c.weight_decay)->capture_default_str();
  sub->add_option("--label-smoothing", c.label_smoothing)->capture_default_str();
  sub->add_option("--tokens-per-batch", c.tokens_per_batch)->capture_default_str();
  sub->add_option("--checkpoint-interval", c.checkpoint_interval)->capture_default_str();
  sub->add_option("--max-actions", c.max_decode_actions, "Decode cap for dev evaluation")
      ->capture_default_str();
  sub->add_option("--seed", c.seed)->capture_default_str();
  sub->add_option("--beta1", c.beta1)->capture_default_str();
  sub->add_option("--beta2", c.beta2)->capture_default_str();
  sub->add_option("--adam-eps", c.adam_eps)->capture_default_str();
  sub->add_flag("--resample-each-epoch", c.resample_each_epoch,
                "shuff: draw new orders every epoch");
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> raw(argv, argv + argc);
  std::optional<std::string> config_path;
  for (std::size_t i = 0; i + 1 < raw.size(); ++i) {
    if (raw[i] == "--config") config_path = raw[i + 1];
  }
  for (const std::string& a : raw) {
    if (a.rfind("--config=", 0) == 0) config_path = a.substr(9);
  }

  CLI::App app{"Word-level post-edit ordering toolkit"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  // Only for --help; the file itself is spliced in before parsing.
  app.add_option("--config", "Flat key = value file merged under command-line flags");

  Paths paths;
  std::string mode_text = "l2r";
  std::uint64_t seed = 1;

  auto* extract = app.add_subcommand("extract", "Minimal edit scripts from triplets");
  extract->add_option("--in", paths.in, "Samples (JSON lines)")->required();
  extract->add_option("--out", paths.out, "Scripts (JSON lines)")->required();

  auto* reorder = app.add_subcommand("reorder", "l2r or shuffled traces");
  reorder->add_option("--in", paths.in)->required();
  reorder->add_option("--out", paths.out)->required();
  reorder->add_option("--mode", mode_text)
      ->check(CLI::IsMember({"l2r", "shuff"}))
      ->capture_default_str();
  reorder->add_option("--seed", seed)->capture_default_str();

  auto* replay_cmd = app.add_subcommand("replay", "Keystroke logs to unfiltered human traces");
  replay_cmd->add_option("--in", paths.in)->required();
  replay_cmd->add_option("--out", paths.out)->required();

  auto* align_cmd = app.add_subcommand("align", "Human-ordered (h-ord) traces");
  align_cmd->add_option("--in", paths.in)->required();
  align_cmd->add_option("--out", paths.out)->required();

  SynthOptions synth_opts;
  auto* synth = app.add_subcommand("synth", "Synthetic samples with keystroke logs");
  synth->add_option("--out", synth_opts.out)->required();
  synth->add_option("--human-out", synth_opts.human_out, "Generating human traces");
  synth->add_option("--samples", synth_opts.corpus.samples)->capture_default_str();
  synth->add_option("--vocab", synth_opts.corpus.vocab)->capture_default_str();
  synth->add_option("--min-len", synth_opts.corpus.min_len)->capture_default_str();
  synth->add_option("--max-len", synth_opts.corpus.max_len)->capture_default_str();
  synth->add_option("--max-edits", synth_opts.corpus.max_edits)->capture_default_str();
  synth->add_option("--injected-rate", synth_opts.corpus.injected_rate)->capture_default_str();
  synth->add_option("--hesitation-rate", synth_opts.corpus.typing.hesitation_rate)
      ->capture_default_str();
  synth->add_option("--typo-rate", synth_opts.corpus.typing.typo_rate)->capture_default_str();
  synth->add_option("--block-delete-rate", synth_opts.corpus.typing.block_delete_rate)
      ->capture_default_str();
  synth->add_option("--seed", synth_opts.corpus.seed)->capture_default_str();

  AnalyzeOptions analyze_opts;
  auto* analyze = app.add_subcommand("analyze", "Ordering statistics, curves, POS differences");
  analyze->add_option("--samples", analyze_opts.samples)->required();
  analyze->add_option("--traces", analyze_opts.traces, "Trace datasets (repeatable)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  analyze->add_option("--decoded", analyze_opts.decoded, "Decode outputs (repeatable)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  analyze->add_option("--out-dir", analyze_opts.out_dir)->required();
  analyze->add_option("--grid-size", analyze_opts.grid_size)->capture_default_str();
  analyze->add_option("--min-diff", analyze_opts.min_diff)->capture_default_str();
  analyze->add_option("--jump-threshold", analyze_opts.thresholds, "Jump-back size thresholds")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->capture_default_str();

  TrainOptions train_opts;
  auto* train_cmd = app.add_subcommand("train", "Train the action model");
  train_cmd->add_option("--samples", train_opts.samples)->required();
  train_cmd->add_option("--traces", train_opts.traces, "Ordered dataset")->required();
  train_cmd->add_option("--dev", train_opts.dev, "Dev samples for checkpoint selection");
  train_cmd->add_option("--out", train_opts.out, "Selected checkpoint")->required();
  train_cmd->add_option("--last-out", train_opts.last_out, "Checkpoint after the last step");
  train_cmd->add_option("--log", train_opts.log, "Training log CSV");
  train_cmd->add_option("--checkpoint-dir", train_opts.checkpoint_dir);
  train_cmd->add_option("--stop-at-exact-match", train_opts.stop_at_exact_match,
                        "Stop once exact match reaches this fraction (0: never)")
      ->capture_default_str();
  add_train_config(train_cmd, train_opts.config);

  DecodeOptions decode_opts;
  auto* decode_cmd = app.add_subcommand("decode", "Greedy decoding with a checkpoint");
  decode_cmd->add_option("--model", decode_opts.model)->required();
  decode_cmd->add_option("--in", decode_opts.paths.in)->required();
  decode_cmd->add_option("--out", decode_opts.paths.out)->required();
  decode_cmd->add_option("--label", decode_opts.label, "Row label for analyze")
      ->capture_default_str();
  decode_cmd->add_option("--max-actions", decode_opts.config.max_actions)->capture_default_str();
  decode_cmd->add_flag("--nth-best-on-revisit", decode_opts.config.nth_best_on_revisit,
                       "Take the n-th best action on the n-th visit of a state");

  EvaluateOptions eval_opts;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "TER and BLEU against pe");
  evaluate_cmd->add_option("--ref", eval_opts.ref, "Samples holding pe")->required();
  evaluate_cmd->add_option("--decoded", eval_opts.decoded);
  evaluate_cmd->add_option("--traces", eval_opts.traces, "Traces applied to mt");
  evaluate_cmd->add_option("--hyp-text", eval_opts.hyp_text, "One hypothesis per line");
  evaluate_cmd->add_flag("--uncorrected", eval_opts.uncorrected, "Score mt itself");
  evaluate_cmd->add_flag("--shift-ter", eval_opts.ter.shifts, "Greedy block shifts in TER");
  evaluate_cmd->add_option("--max-shift-size", eval_opts.ter.max_shift_size)
      ->capture_default_str();
  evaluate_cmd->add_option("--out", eval_opts.out, "Report JSON (default stdout)");
  evaluate_cmd->add_option("--per-sentence", eval_opts.per_sentence, "Per-sentence CSV");

  CLI::App* active = nullptr;
  try {
    std::vector<std::string> args = expand_config(raw);
    args.erase(args.begin());
    std::reverse(args.begin(), args.end());
    app.parse(args);
    active = app.get_subcommands().front();
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  } catch (const Error& e) {
    log_event({{"event", "error"},
               {"code", std::string(to_string(e.code()))},
               {"message", e.what()}});
    return exit_code(e.code());
  }

  log_event({{"event", "config"},
             {"subcommand", active->get_name()},
             {"options", echo_options(*active, config_path)}});
  try {
    const std::string name = active->get_name();
    if (name == "extract") {
      run_extract(paths);
    } else if (name == "reorder") {
      run_ordering(paths, parse_ordering_mode(mode_text), seed, "reorder");
    } else if (name == "replay") {
      run_ordering(paths, OrderingMode::kHumanUnfiltered, 0, "replay");
    } else if (name == "align") {
      run_ordering(paths, OrderingMode::kHumanOrdered, 0, "align");
    } else if (name == "synth") {
      run_synth(synth_opts);
    } else if (name == "analyze") {
      run_analyze(analyze_opts);
    } else if (name == "train") {
      run_train(train_opts);
    } else if (name == "decode") {
      run_decode(decode_opts);
    } else if (name == "evaluate") {
      run_evaluate(eval_opts);
    }
  } catch (const Error& e) {
    log_event({{"event", "error"},
               {"code", std::string(to_string(e.code()))},
               {"message", e.what()}});
    return exit_code(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    log_event({{"event", "error"}, {"code", "io"}, {"message", e.what()}});
    return kIoFailure;
  } catch (const std::exception& e) {
    log_event({{"event", "error"}, {"code", "internal"}, {"message", e.what()}});
    return kInternal;
  }
  return kOk;
}
