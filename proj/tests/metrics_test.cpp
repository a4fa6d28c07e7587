#include "keyape/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "keyape/error.hpp"
#include "keyape/reorder.hpp"
#include "keyape/synthetic.hpp"

namespace keyape {
namespace {

// Plain recursion over the three edits.
std::size_t brute_edits(const Sentence& a, std::size_t i, const Sentence& b, std::size_t j) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  std::size_t best = 1 + std::min(brute_edits(a, i + 1, b, j), brute_edits(a, i, b, j + 1));
  return std::min(best, (a[i] == b[j] ? 0 : 1) + brute_edits(a, i + 1, b, j + 1));
}

TEST(TerTest, Examples) {
  EXPECT_DOUBLE_EQ(ter({"a", "b"}, {"a", "b"}), 0.0);
  EXPECT_DOUBLE_EQ(ter(tokenize("a b c"), tokenize("a c")), 0.5);
  EXPECT_DOUBLE_EQ(ter(tokenize("a x c"), tokenize("a b c")), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(ter({}, tokenize("a b")), 1.0);
}

TEST(TerTest, EmptyReference) {
  try {
    ter({"a"}, {});
    FAIL() << "expected undefined-metric";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUndefinedMetric);
  }
}

TEST(TerTest, MatchesRecursionAndProperties) {
  Rng rng(2);
  for (int n = 0; n < 300; ++n) {
    const Sentence x = random_sentence(rng, 4, 1, 7);
    const Sentence y = random_sentence(rng, 4, 1, 7);
    EXPECT_EQ(ter_edits(x, y), brute_edits(x, 0, y, 0));
    EXPECT_DOUBLE_EQ(ter(x, y) * y.size(), ter(y, x) * x.size());
    EXPECT_LE(ter(x, y), static_cast<double>(x.size() + y.size()) / y.size());
  }
}

TEST(TerTest, ShiftsAreOptional) {
  const Sentence hyp = tokenize("b c d a");
  const Sentence ref = tokenize("a b c d");
  EXPECT_EQ(ter_edits(hyp, ref), 2u);
  TerOptions shifting;
  shifting.shifts = true;
  EXPECT_EQ(ter_edits(hyp, ref, shifting), 1u);
  EXPECT_DOUBLE_EQ(ter(hyp, ref, shifting), 0.25);
}

TEST(TerTest, ShiftsNeverHurt) {
  Rng rng(6);
  TerOptions shifting;
  shifting.shifts = true;
  for (int n = 0; n < 100; ++n) {
    const Sentence x = random_sentence(rng, 5, 1, 9);
    const Sentence y = random_sentence(rng, 5, 1, 9);
    EXPECT_LE(ter_edits(x, y, shifting), ter_edits(x, y));
  }
}

TEST(TerTest, CorpusPoolsLengths) {
  const std::vector<Sentence> hyps{tokenize("a b c"), tokenize("x")};
  const std::vector<Sentence> refs{tokenize("a c"), tokenize("y z w")};
  EXPECT_DOUBLE_EQ(corpus_ter(hyps, refs), (1.0 + 3.0) / 5.0);
}

TEST(BleuTest, ClosedForm) {
  const std::vector<Sentence> hyps{tokenize("a b c d")};
  const std::vector<Sentence> refs{tokenize("a b c d e")};
  EXPECT_NEAR(bleu(hyps, refs), 100.0 * std::exp(1.0 - 5.0 / 4.0), 1e-6);
  EXPECT_NEAR(bleu(hyps, refs), 77.88007830714049, 1e-6);
}

TEST(BleuTest, SmoothedOrders) {
  const std::vector<Sentence> hyps{tokenize("a b c d")};
  const std::vector<Sentence> refs{tokenize("a b d c")};
  // 4/4, 1/3, 0 of 2 -> 1/3, 0 of 1 -> 1/2.
  EXPECT_NEAR(bleu(hyps, refs), 100.0 * std::pow(1.0 / 18.0, 0.25), 1e-9);
}

TEST(BleuTest, IdenticalAndDisjoint) {
  const std::vector<Sentence> refs{tokenize("the cat sat on it"), tokenize("a b c d")};
  EXPECT_DOUBLE_EQ(bleu(refs, refs), 100.0);
  const std::vector<Sentence> hyps{tokenize("x y z"), tokenize("q")};
  EXPECT_DOUBLE_EQ(bleu(hyps, refs), 0.0);
}

TEST(BleuTest, HundredOnlyWhenIdentical) {
  const std::vector<Sentence> refs{tokenize("a b c d e")};
  const std::vector<Sentence> hyps{tokenize("a b c d f")};
  EXPECT_LT(bleu(hyps, refs), 100.0);
}

TEST(BleuTest, Pairing) {
  const std::vector<Sentence> one{tokenize("a")};
  const std::vector<Sentence> two{tokenize("a"), tokenize("b")};
  EXPECT_THROW(bleu(one, two), Error);
  EXPECT_THROW(corpus_ter(one, two), Error);
}

TEST(EvaluateTest, Report) {
  const std::vector<Sentence> refs{tokenize("a b c d")};
  const EvalReport r = evaluate(refs, refs);
  EXPECT_DOUBLE_EQ(r.ter, 0.0);
  EXPECT_DOUBLE_EQ(r.bleu, 100.0);
  EXPECT_EQ(r.n_sentences, 1u);
}

}  // namespace
}  // namespace keyape
