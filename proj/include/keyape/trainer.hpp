#ifndef KEYAPE_TRAINER_HPP
#define KEYAPE_TRAINER_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "keyape/corpus.hpp"
#include "keyape/decode_result.hpp"
#include "keyape/model.hpp"

namespace keyape {

struct TrainConfig {
  ModelConfig model;
  double peak_lr = 5e-5;
  std::size_t warmup = 5000;
  std::size_t total_steps = 100000;
  double weight_decay = 1e-4;
  double label_smoothing = 0.1;
  std::size_t tokens_per_batch = 512;
  std::size_t checkpoint_interval = 10000;
  std::size_t max_decode_actions = 50;
  std::uint64_t seed = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  // shuff only: draw fresh orders every epoch instead of once per dataset.
  bool resample_each_epoch = false;
};

// Throws Error(kConfiguration) for out-of-range values.
void validate(const TrainConfig& config);

// Linear warmup from 0 to peak_lr at `warmup`, then linear decay to 0 at
// total_steps.
double learning_rate(const TrainConfig& config, std::size_t step);

// Words of src, mt and pe in first-seen order.
Vocabulary build_vocabulary(std::span<const Sample> samples);

struct LogRow {
  std::size_t step = 0;
  double lr = 0.0;
  double loss = 0.0;  // mean step loss of the batch
  // Corpus TER on the dev set; NaN when no evaluation ran at this step.
  double dev_ter = std::numeric_limits<double>::quiet_NaN();
};

struct Checkpoint {
  TrainConfig config;
  Vocabulary vocab;
  ModelParams params;
  std::size_t step = 0;
};

struct TrainResult {
  Checkpoint best;  // lowest dev TER, or the last checkpoint without a dev set
  Checkpoint last;
  double best_dev_ter = std::numeric_limits<double>::quiet_NaN();
  std::vector<LogRow> log;
};

// Returning false ends training after this checkpoint.
using CheckpointCallback = std::function<bool(const Checkpoint&, const LogRow&)>;

// Teacher-forced training on (state, gold action) pairs. Dataset entries are
// matched to samples by id. The callback runs at every checkpoint, including
// the final step. Throws Error(kNonFinite) naming the step and sample id when
// a loss is not finite, Error(kPairing) for an entry without a sample.
TrainResult train(std::span<const Sample> samples, const OrderedDataset& dataset,
                  const TrainConfig& config, std::span<const Sample> dev = {},
                  const CheckpointCallback& on_checkpoint = {});

std::vector<DecodeResult> decode_all(const Checkpoint& model, std::span<const Sample> samples,
                                     const DecodeConfig& config);
// Fraction of results whose final sentence equals the sample's pe.
double exact_match_rate(std::span<const Sample> samples, std::span<const DecodeResult> results);

// JSON with a format version, the config echo, vocabulary and every tensor.
std::string format_checkpoint(const Checkpoint& checkpoint);
Checkpoint parse_checkpoint(const std::string& text);
void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

std::string format_config(const TrainConfig& config);
// Keys not present in `text` keep their values from `base`.
TrainConfig parse_config(const std::string& json_text, const TrainConfig& base = {});

// step,lr,loss,dev_ter; dev_ter is empty on rows without an evaluation.
std::string log_csv(std::span<const LogRow> log);

}  // namespace keyape

#endif  // KEYAPE_TRAINER_HPP
