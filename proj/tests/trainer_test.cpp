#include "keyape/trainer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "keyape/error.hpp"
#include "keyape/metrics.hpp"
#include "keyape/synthetic.hpp"

namespace keyape {
namespace {

std::vector<Sample> tiny_corpus(std::size_t n, std::uint64_t seed) {
  CorpusOptions options;
  options.samples = n;
  options.vocab = 12;
  options.min_len = 2;
  options.max_len = 5;
  options.max_edits = 2;
  options.seed = seed;
  return synthetic_corpus(options).samples;
}

TrainConfig tiny_config() {
  TrainConfig c;
  c.model = {1, 16, 2, 32, 32, 0.1};
  c.peak_lr = 3e-3;
  c.warmup = 10;
  c.total_steps = 30;
  c.tokens_per_batch = 64;
  c.checkpoint_interval = 10;
  c.max_decode_actions = 10;
  c.seed = 5;
  return c;
}

TEST(ScheduleTest, TriangularShape) {
  TrainConfig c;
  c.peak_lr = 5e-5;
  c.warmup = 5000;
  c.total_steps = 105000;
  EXPECT_DOUBLE_EQ(learning_rate(c, 0), 0.0);
  EXPECT_DOUBLE_EQ(learning_rate(c, 2500), 2.5e-5);
  EXPECT_DOUBLE_EQ(learning_rate(c, 5000), 5e-5);
  EXPECT_DOUBLE_EQ(learning_rate(c, 55000), 2.5e-5);
  EXPECT_DOUBLE_EQ(learning_rate(c, 105000), 0.0);
  EXPECT_DOUBLE_EQ(learning_rate(c, 200000), 0.0);
  for (std::size_t s = 1; s < 105000; s += 997) {
    EXPECT_GT(learning_rate(c, s), 0.0);
    EXPECT_LE(learning_rate(c, s), c.peak_lr);
  }
}

TEST(ConfigTest, ValidationAndJson) {
  TrainConfig c = tiny_config();
  EXPECT_NO_THROW(validate(c));
  c.warmup = 0;
  EXPECT_THROW(validate(c), Error);
  c = tiny_config();
  c.label_smoothing = 1.0;
  EXPECT_THROW(validate(c), Error);

  const TrainConfig back = parse_config(format_config(tiny_config()));
  EXPECT_EQ(format_config(back), format_config(tiny_config()));
  const TrainConfig partial = parse_config(R"({"peak_lr": 0.5})", tiny_config());
  EXPECT_DOUBLE_EQ(partial.peak_lr, 0.5);
  EXPECT_EQ(partial.warmup, 10u);
  EXPECT_THROW(parse_config(R"({"peak_rl": 0.5})"), Error);
}

TEST(TrainTest, DeterministicGivenSeed) {
  const std::vector<Sample> samples = tiny_corpus(6, 2);
  const OrderedDataset data = build_training_set(samples, OrderingMode::kShuffled, 3);
  const TrainResult a = train(samples, data, tiny_config());
  const TrainResult b = train(samples, data, tiny_config());
  ASSERT_EQ(a.log.size(), 30u);
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) EXPECT_EQ(a.log[i].loss, b.log[i].loss);

  TrainConfig other = tiny_config();
  other.seed = 6;
  const TrainResult c = train(samples, data, other);
  EXPECT_NE(c.log.back().loss, a.log.back().loss);
}

TEST(TrainTest, LossDecreases) {
  const std::vector<Sample> samples = tiny_corpus(4, 7);
  const OrderedDataset data = build_training_set(samples, OrderingMode::kL2r, 0);
  TrainConfig c = tiny_config();
  c.total_steps = 150;
  c.checkpoint_interval = 50;
  const TrainResult r = train(samples, data, c, samples);
  double head = 0, tail = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    head += r.log[i].loss;
    tail += r.log[r.log.size() - 1 - i].loss;
  }
  EXPECT_LT(tail, 0.5 * head);
  // Dev evaluation at steps 50, 100, 150 only.
  std::size_t evaluated = 0;
  for (const LogRow& row : r.log) {
    if (!std::isnan(row.dev_ter)) {
      ++evaluated;
      EXPECT_EQ(row.step % 50, 0u);
      EXPECT_GE(row.dev_ter, r.best_dev_ter);
    }
  }
  EXPECT_EQ(evaluated, 3u);
}

TEST(TrainTest, CheckpointsAndSelection) {
  const std::vector<Sample> samples = tiny_corpus(4, 9);
  const OrderedDataset data = build_training_set(samples, OrderingMode::kL2r, 0);
  std::vector<std::size_t> seen;
  const TrainResult r = train(samples, data, tiny_config(), samples,
                              [&](const Checkpoint& c, const LogRow& row) {
                                EXPECT_EQ(c.step, row.step);
                                seen.push_back(row.step);
                                return true;
                              });
  EXPECT_EQ(seen, (std::vector<std::size_t>{10, 20, 30}));
  EXPECT_EQ(r.last.step, 30u);
  EXPECT_TRUE(r.best.step == 10 || r.best.step == 20 || r.best.step == 30);

  // The selected checkpoint reproduces its logged dev TER.
  const std::vector<DecodeResult> decoded =
      decode_all(r.best, samples, {r.best.config.max_decode_actions, false});
  std::vector<Sentence> hyps, refs;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    hyps.push_back(decoded[i].final);
    refs.push_back(samples[i].pe);
  }
  double logged = 0;
  for (const LogRow& row : r.log) {
    if (row.step == r.best.step) logged = row.dev_ter;
  }
  EXPECT_DOUBLE_EQ(corpus_ter(hyps, refs), logged);
}

TEST(TrainTest, CallbackStopsEarly) {
  const std::vector<Sample> samples = tiny_corpus(4, 9);
  const OrderedDataset data = build_training_set(samples, OrderingMode::kL2r, 0);
  const TrainResult r = train(samples, data, tiny_config(), {},
                              [](const Checkpoint&, const LogRow& row) { return row.step < 20; });
  EXPECT_EQ(r.log.size(), 20u);
  EXPECT_EQ(r.last.step, 20u);
  EXPECT_EQ(r.best.step, 20u);
}

TEST(TrainTest, WeightDecayOnlyOnEncoderWeights) {
  const std::vector<Sample> samples = tiny_corpus(3, 4);
  const OrderedDataset data = build_training_set(samples, OrderingMode::kL2r, 0);
  TrainConfig c = tiny_config();
  c.model.dropout = 0.0;
  // One update: both runs see the same gradient, so only decay can differ.
  c.total_steps = 1;
  c.weight_decay = 0.0;
  const TrainResult one_plain = train(samples, data, c);
  c.weight_decay = 50.0;
  const TrainResult one_decayed = train(samples, data, c);
  std::vector<const Matrix*> other;
  one_decayed.last.params.for_each(
      [&](const std::string&, const Matrix& m, ParamGroup) { other.push_back(&m); });
  std::size_t k = 0;
  one_plain.last.params.for_each([&](const std::string& name, const Matrix& m, ParamGroup g) {
    const bool differs = !(m.array() == other[k++]->array()).all();
    if (g == ParamGroup::kEncoderWeight) {
      EXPECT_TRUE(differs) << name;
    } else {
      EXPECT_FALSE(differs) << name;
    }
  });
}

TEST(TrainTest, NonFiniteLossNamesStepAndSample) {
  const std::vector<Sample> samples = tiny_corpus(3, 4);
  const OrderedDataset data = build_training_set(samples, OrderingMode::kL2r, 0);
  TrainConfig c = tiny_config();
  c.peak_lr = 1e300;
  c.warmup = 1;
  try {
    train(samples, data, c);
    FAIL() << "expected a non-finite loss";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFinite);
    const std::string what = e.what();
    EXPECT_NE(what.find("step "), std::string::npos) << what;
    EXPECT_NE(what.find("sample 'syn-"), std::string::npos) << what;
  }
}

TEST(TrainTest, UnknownEntry) {
  const std::vector<Sample> samples = tiny_corpus(2, 4);
  OrderedDataset data = build_training_set(samples, OrderingMode::kL2r, 0);
  data.entries[0].id = "missing";
  EXPECT_THROW(train(samples, data, tiny_config()), Error);
}

TEST(CheckpointTest, RoundTripIsExact) {
  const std::vector<Sample> samples = tiny_corpus(3, 11);
  const OrderedDataset data = build_training_set(samples, OrderingMode::kL2r, 0);
  const TrainResult r = train(samples, data, tiny_config());
  const std::string path =
      (std::filesystem::temp_directory_path() / "keyape_checkpoint.json").string();
  save_checkpoint(path, r.last);
  const Checkpoint back = load_checkpoint(path);
  EXPECT_EQ(back.step, r.last.step);
  EXPECT_EQ(back.vocab.words(), r.last.vocab.words());
  EXPECT_EQ(format_config(back.config), format_config(r.last.config));
  std::vector<const Matrix*> loaded;
  back.params.for_each(
      [&](const std::string&, const Matrix& m, ParamGroup) { loaded.push_back(&m); });
  std::size_t k = 0;
  r.last.params.for_each([&](const std::string& name, const Matrix& m, ParamGroup) {
    EXPECT_TRUE((m.array() == loaded[k++]->array()).all()) << name;
  });
  std::filesystem::remove(path);

  EXPECT_THROW(parse_checkpoint("{}"), Error);
  EXPECT_THROW(parse_checkpoint("not json"), Error);
}

TEST(LogTest, CsvLayout) {
  std::vector<LogRow> log{{1, 0.5, 2.0}, {2, 0.25, 1.0, 0.125}};
  EXPECT_EQ(log_csv(log), "step,lr,loss,dev_ter\n1,0.5,2,\n2,0.25,1,0.125000\n");
}

TEST(VocabularyTest, FirstSeenOrder) {
  Sample s;
  s.src = {"q", "a"};
  s.mt = {"a", "b"};
  s.pe = {"c"};
  const std::vector<Sample> samples{s};
  const Vocabulary v = build_vocabulary(samples);
  EXPECT_EQ(v.words(), (std::vector<std::string>{"<unk>", "q", "a", "b", "c"}));
}

}  // namespace
}  // namespace keyape
