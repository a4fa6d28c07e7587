#include "keyape/trainer.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include "keyape/error.hpp"
#include "keyape/io.hpp"
#include "keyape/metrics.hpp"

namespace keyape {
namespace {

using nlohmann::json;

constexpr int kCheckpointVersion = 1;

struct Pair {
  std::size_t sample;
  ModelInput input;
  EditAction gold;
};

// Entry e of the dataset belongs to samples[e].
std::vector<Pair> make_pairs(std::span<const Sample> samples, const OrderedDataset& dataset,
                             const Vocabulary& vocab) {
  std::vector<Pair> pairs;
  for (std::size_t e = 0; e < dataset.entries.size(); ++e) {
    const Sample& s = samples[e];
    Sentence state = s.mt;
    for (const EditAction& action : dataset.entries[e].trace) {
      pairs.push_back({e, make_input(vocab, s.src, state), action});
      if (action.is_stop()) break;
      apply_in_place(state, action);
    }
  }
  return pairs;
}

// Flat views over the tensors of several parameter sets, in for_each order.
std::vector<Matrix*> tensors(ModelParams& p, std::vector<ParamGroup>* groups = nullptr) {
  std::vector<Matrix*> out;
  p.for_each([&](const std::string&, Matrix& m, ParamGroup g) {
    out.push_back(&m);
    if (groups) groups->push_back(g);
  });
  return out;
}

json config_json(const TrainConfig& c) {
  return {{"layers", c.model.layers},
          {"hidden", c.model.hidden},
          {"heads", c.model.heads},
          {"ffn", c.model.ffn},
          {"max_positions", c.model.max_positions},
          {"dropout", c.model.dropout},
          {"peak_lr", c.peak_lr},
          {"warmup", c.warmup},
          {"total_steps", c.total_steps},
          {"weight_decay", c.weight_decay},
          {"label_smoothing", c.label_smoothing},
          {"tokens_per_batch", c.tokens_per_batch},
          {"checkpoint_interval", c.checkpoint_interval},
          {"max_decode_actions", c.max_decode_actions},
          {"seed", c.seed},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"adam_eps", c.adam_eps},
          {"resample_each_epoch", c.resample_each_epoch}};
}

template <typename T>
void read_key(const json& j, const char* key, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfiguration, std::string("config key '") + key + "': " + e.what());
  }
}

TrainConfig config_from_json(const json& j, TrainConfig c) {
  if (!j.is_object()) throw Error(ErrorCode::kConfiguration, "config must be a JSON object");
  static const std::unordered_set<std::string> known{
      "layers",     "hidden",         "heads",    "ffn",
      "max_positions", "dropout",     "peak_lr",  "warmup",
      "total_steps", "weight_decay",  "label_smoothing", "tokens_per_batch",
      "checkpoint_interval", "max_decode_actions", "seed", "beta1",
      "beta2",      "adam_eps",       "resample_each_epoch"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) {
      throw Error(ErrorCode::kConfiguration, "unknown config key '" + key + "'");
    }
  }
  read_key(j, "layers", c.model.layers);
  read_key(j, "hidden", c.model.hidden);
  read_key(j, "heads", c.model.heads);
  read_key(j, "ffn", c.model.ffn);
  read_key(j, "max_positions", c.model.max_positions);
  read_key(j, "dropout", c.model.dropout);
  read_key(j, "peak_lr", c.peak_lr);
  read_key(j, "warmup", c.warmup);
  read_key(j, "total_steps", c.total_steps);
  read_key(j, "weight_decay", c.weight_decay);
  read_key(j, "label_smoothing", c.label_smoothing);
  read_key(j, "tokens_per_batch", c.tokens_per_batch);
  read_key(j, "checkpoint_interval", c.checkpoint_interval);
  read_key(j, "max_decode_actions", c.max_decode_actions);
  read_key(j, "seed", c.seed);
  read_key(j, "beta1", c.beta1);
  read_key(j, "beta2", c.beta2);
  read_key(j, "adam_eps", c.adam_eps);
  read_key(j, "resample_each_epoch", c.resample_each_epoch);
  return c;
}

double dev_ter(const Checkpoint& model, std::span<const Sample> dev) {
  const std::vector<DecodeResult> results =
      decode_all(model, dev, {model.config.max_decode_actions, false});
  std::vector<Sentence> hyps, refs;
  for (std::size_t i = 0; i < dev.size(); ++i) {
    hyps.push_back(results[i].final);
    refs.push_back(dev[i].pe);
  }
  return corpus_ter(hyps, refs);
}

}  // namespace

void validate(const TrainConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kConfiguration, what);
  };
  require(c.peak_lr > 0.0 && std::isfinite(c.peak_lr), "peak_lr must be positive");
  require(c.warmup >= 1, "warmup must be >= 1");
  require(c.total_steps >= 1, "total_steps must be >= 1");
  require(c.weight_decay >= 0.0, "weight_decay must be >= 0");
  require(c.label_smoothing >= 0.0 && c.label_smoothing < 1.0,
          "label_smoothing must be in [0, 1)");
  require(c.model.dropout >= 0.0 && c.model.dropout < 1.0, "dropout must be in [0, 1)");
  require(c.tokens_per_batch >= 1, "tokens_per_batch must be >= 1");
  require(c.checkpoint_interval >= 1, "checkpoint_interval must be >= 1");
  require(c.max_decode_actions >= 1, "max_decode_actions must be >= 1");
  require(c.beta1 >= 0.0 && c.beta1 < 1.0, "beta1 must be in [0, 1)");
  require(c.beta2 >= 0.0 && c.beta2 < 1.0, "beta2 must be in [0, 1)");
  require(c.adam_eps > 0.0, "adam_eps must be positive");
}

double learning_rate(const TrainConfig& c, std::size_t step) {
  const auto s = static_cast<double>(step);
  const auto warmup = static_cast<double>(c.warmup);
  if (step <= c.warmup) return c.peak_lr * s / warmup;
  if (step >= c.total_steps) return 0.0;
  const auto total = static_cast<double>(c.total_steps);
  return c.peak_lr * (total - s) / (total - warmup);
}

Vocabulary build_vocabulary(std::span<const Sample> samples) {
  Vocabulary vocab;
  for (const Sample& s : samples) {
    for (const Sentence* sentence : {&s.src, &s.mt, &s.pe}) {
      for (const std::string& word : *sentence) vocab.add(word);
    }
  }
  return vocab;
}

TrainResult train(std::span<const Sample> samples, const OrderedDataset& dataset,
                  const TrainConfig& config, std::span<const Sample> dev,
                  const CheckpointCallback& on_checkpoint) {
  validate(config);
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < samples.size(); ++i) by_id.emplace(samples[i].id, i);
  std::vector<Sample> used;
  for (const OrderedEntry& entry : dataset.entries) {
    const auto it = by_id.find(entry.id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kPairing, "dataset entry '" + entry.id + "' has no sample");
    }
    used.push_back(samples[it->second]);
  }
  const bool resample = config.resample_each_epoch && !dataset.entries.empty() &&
                        dataset.entries.front().mode == OrderingMode::kShuffled;

  Checkpoint model;
  model.config = config;
  model.vocab = build_vocabulary(samples);
  Rng init_rng(derive_seed(config.seed, 0));
  Rng order_rng(derive_seed(config.seed, 1));
  Rng dropout_rng(derive_seed(config.seed, 2));
  model.params = init_params(config.model, model.vocab.input_size(), model.vocab.size(),
                             init_rng);

  ModelParams grads = model.params.zeros_like();
  ModelParams adam_m = grads;
  ModelParams adam_v = grads;
  std::vector<ParamGroup> groups;
  const std::vector<Matrix*> p_t = tensors(model.params, &groups);
  const std::vector<Matrix*> g_t = tensors(grads);
  const std::vector<Matrix*> m_t = tensors(adam_m);
  const std::vector<Matrix*> v_t = tensors(adam_v);
  Rng* drop = config.model.dropout > 0.0 ? &dropout_rng : nullptr;

  TrainResult result;
  std::vector<Pair> pairs = make_pairs(used, dataset, model.vocab);
  if (pairs.empty()) throw Error(ErrorCode::kConfiguration, "training set is empty");

  std::size_t step = 0;
  bool stop = false;
  for (std::size_t epoch = 0; step < config.total_steps && !stop; ++epoch) {
    if (resample && epoch > 0) {
      const OrderedDataset fresh = build_training_set(
          used, OrderingMode::kShuffled, derive_seed(dataset.seed, epoch));
      pairs = make_pairs(used, fresh, model.vocab);
    }
    const Permutation order = Permutation::random(pairs.size(), order_rng);
    std::size_t next = 0;
    while (next < pairs.size() && step < config.total_steps && !stop) {
      std::vector<std::size_t> batch;
      std::size_t tokens = 0;
      while (next < pairs.size()) {
        const std::size_t size = pairs[order.order[next]].input.size();
        if (!batch.empty() && tokens + size > config.tokens_per_batch) break;
        batch.push_back(order.order[next++]);
        tokens += size;
      }
      for (Matrix* g : g_t) g->setZero();
      const double weight = 1.0 / static_cast<double>(batch.size());
      double loss = 0.0;
      for (std::size_t k : batch) {
        const Pair& pair = pairs[k];
        auto non_finite = [&] {
          return Error(ErrorCode::kNonFinite, "step " + std::to_string(step + 1) +
                                                  ", sample '" + used[pair.sample].id +
                                                  "': non-finite loss");
        };
        double l;
        try {
          l = step_loss(model.params, model.vocab, pair.input, pair.gold,
                        config.label_smoothing, &grads, weight, drop);
        } catch (const Error& e) {
          if (e.code() == ErrorCode::kNonFinite) throw non_finite();
          throw;
        }
        if (!std::isfinite(l)) throw non_finite();
        loss += l * weight;
      }

      ++step;
      const double lr = learning_rate(config, step);
      const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
      for (std::size_t t = 0; t < p_t.size(); ++t) {
        Matrix& p = *p_t[t];
        const Matrix& g = *g_t[t];
        Matrix& m = *m_t[t];
        Matrix& v = *v_t[t];
        m = config.beta1 * m + (1.0 - config.beta1) * g;
        v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseProduct(g);
        const Matrix update =
            (m / c1).array() / ((v / c2).array().sqrt() + config.adam_eps);
        if (groups[t] == ParamGroup::kEncoderWeight) p -= lr * config.weight_decay * p;
        p -= lr * update;
      }

      LogRow row{step, lr, loss};
      if (step % config.checkpoint_interval == 0 || step == config.total_steps) {
        model.step = step;
        if (!dev.empty()) {
          row.dev_ter = dev_ter(model, dev);
          if (std::isnan(result.best_dev_ter) || row.dev_ter < result.best_dev_ter) {
            result.best_dev_ter = row.dev_ter;
            result.best = model;
          }
        } else {
          result.best = model;
        }
        result.log.push_back(row);
        if (on_checkpoint && !on_checkpoint(model, row)) stop = true;
      } else {
        result.log.push_back(row);
      }
    }
  }
  result.last = std::move(model);
  return result;
}

std::vector<DecodeResult> decode_all(const Checkpoint& model, std::span<const Sample> samples,
                                     const DecodeConfig& config) {
  std::vector<DecodeResult> results;
  results.reserve(samples.size());
  for (const Sample& s : samples) {
    results.push_back(decode(model.params, model.vocab, s.src, s.mt, config));
  }
  return results;
}

double exact_match_rate(std::span<const Sample> samples, std::span<const DecodeResult> results) {
  if (samples.size() != results.size()) {
    throw Error(ErrorCode::kPairing, "sample and result counts differ");
  }
  if (samples.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (results[i].final == samples[i].pe) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

std::string format_checkpoint(const Checkpoint& c) {
  json words = json::array();
  // Index 0 is always UNK and is implied.
  for (std::size_t i = 1; i < c.vocab.size(); ++i) words.push_back(c.vocab.word(i));
  json tensors_json = json::object();
  c.params.for_each([&](const std::string& name, const Matrix& m, ParamGroup) {
    json data = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back(m(r, k));
    }
    tensors_json[name] = {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
  });
  const json out = {{"format", "keyape-checkpoint"},
                    {"version", kCheckpointVersion},
                    {"step", c.step},
                    {"config", config_json(c.config)},
                    {"vocab", std::move(words)},
                    {"tensors", std::move(tensors_json)}};
  return out.dump() + "\n";
}

Checkpoint parse_checkpoint(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("checkpoint: ") + e.what());
  }
  try {
    if (j.value("format", "") != "keyape-checkpoint") {
      throw Error(ErrorCode::kParse, "not a checkpoint file");
    }
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw Error(ErrorCode::kParse, "unsupported checkpoint version");
    }
    Checkpoint c;
    c.step = j.at("step").get<std::size_t>();
    c.config = config_from_json(j.at("config"), {});
    for (const json& w : j.at("vocab")) c.vocab.add(w.get<std::string>());
    Rng unused(0);
    c.params = init_params(c.config.model, c.vocab.input_size(), c.vocab.size(), unused);
    const json& tj = j.at("tensors");
    c.params.for_each([&](const std::string& name, Matrix& m, ParamGroup) {
      const json& t = tj.at(name);
      if (t.at("rows").get<Eigen::Index>() != m.rows() ||
          t.at("cols").get<Eigen::Index>() != m.cols()) {
        throw Error(ErrorCode::kParse, "tensor '" + name + "' has the wrong shape");
      }
      const json& data = t.at("data");
      if (static_cast<Eigen::Index>(data.size()) != m.size()) {
        throw Error(ErrorCode::kParse, "tensor '" + name + "' has the wrong size");
      }
      std::size_t k = 0;
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index col = 0; col < m.cols(); ++col) m(r, col) = data[k++].get<double>();
      }
    });
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  write_file_atomic(path, format_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::string& path) { return parse_checkpoint(read_file(path)); }

std::string format_config(const TrainConfig& config) { return config_json(config).dump(); }

TrainConfig parse_config(const std::string& json_text, const TrainConfig& base) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfiguration, std::string("config: ") + e.what());
  }
  return config_from_json(j, base);
}

std::string log_csv(std::span<const LogRow> log) {
  std::string out = "step,lr,loss,dev_ter\n";
  char buf[128];
  for (const LogRow& row : log) {
    std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9g,", row.step, row.lr, row.loss);
    out += buf;
    if (!std::isnan(row.dev_ter)) {
      std::snprintf(buf, sizeof buf, "%.6f", row.dev_ter);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace keyape
