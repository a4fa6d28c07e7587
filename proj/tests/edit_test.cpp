#include "keyape/edit.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "keyape/error.hpp"
#include "keyape/reorder.hpp"

namespace keyape {
namespace {

// Exhaustive recursion over the three moves; no table, no shared code with
// the library DP.
std::size_t brute_indel(const Sentence& a, std::size_t i, const Sentence& b,
                        std::size_t j) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  std::size_t best = 1 + std::min(brute_indel(a, i + 1, b, j),
                                  brute_indel(a, i, b, j + 1));
  if (a[i] == b[j]) best = std::min(best, brute_indel(a, i + 1, b, j + 1));
  return best;
}

Sentence random_sentence(std::mt19937& gen, std::size_t max_len, int vocab) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<int> tok(0, vocab - 1);
  Sentence s(len(gen));
  for (auto& t : s) t = "w" + std::to_string(tok(gen));
  return s;
}

TEST(ApplyTest, SmallExampleSteps) {
  const Sentence mt = tokenize(fixtures::kSmallMt);
  const Sentence step1 = apply_action(mt, EditAction::insert(2, "ist"));
  EXPECT_EQ(detokenize(step1), "Die LMS ist geöffnet ist .");
  const Sentence step2 = apply_action(step1, EditAction::remove(4, "ist"));
  EXPECT_EQ(detokenize(step2), "Die LMS ist geöffnet .");
}

TEST(ApplyTest, DeleteTokenMismatch) {
  try {
    apply_action({"a"}, EditAction::remove(0, "b"));
    FAIL() << "expected a token mismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTokenMismatch);
  }
}

TEST(ApplyTest, PositionErrors) {
  EXPECT_THROW(apply_action({"a"}, EditAction::remove(1, "a")), Error);
  EXPECT_THROW(apply_action({"a"}, EditAction::insert(2, "b")), Error);
  EXPECT_NO_THROW(apply_action({"a"}, EditAction::insert(1, "b")));
  EXPECT_THROW(apply_action({"a"}, EditAction::stop()), Error);
}

TEST(ApplyTest, DeleteThenInsertRestores) {
  std::mt19937 gen(3);
  for (int round = 0; round < 200; ++round) {
    Sentence s = random_sentence(gen, 10, 6);
    if (s.empty()) continue;
    const std::size_t p = gen() % s.size();
    const std::string tok = s[p];
    const Sentence back =
        apply_action(apply_action(s, EditAction::remove(p, tok)), EditAction::insert(p, tok));
    EXPECT_EQ(back, s);
  }
}

TEST(ApplyAllTest, SmallExample) {
  const Sentence out = apply_all(tokenize(fixtures::kSmallMt),
                                 parse_trace(fixtures::kSmallL2r));
  EXPECT_EQ(detokenize(out), fixtures::kSmallPe);
}

TEST(ApplyAllTest, StopIsIdentity) {
  const Sentence s = {"x", "y"};
  EXPECT_EQ(apply_all(s, parse_trace("STOP")), s);
  EXPECT_EQ(apply_all(s, Trace{}), s);
}

TEST(ApplyAllTest, LongExampleL2rRow) {
  const Sentence out =
      apply_all(tokenize(fixtures::kLongMt), parse_trace(fixtures::kLongL2r));
  EXPECT_EQ(detokenize(out), fixtures::kLongPe);
}

TEST(ApplyAllTest, AllFourRowsReachPe) {
  for (const auto& row : {fixtures::kLongL2r, fixtures::kLongShuff,
                          fixtures::kLongHord, fixtures::kLongHuman}) {
    EXPECT_EQ(detokenize(apply_all(tokenize(fixtures::kLongMt), parse_trace(row))),
              fixtures::kLongPe)
        << row;
  }
}

TEST(ApplyAllTest, ReportsFailingStep) {
  try {
    apply_all({"a", "b"}, parse_trace("D:0:a D:0:x STOP"));
    FAIL() << "expected failure";
  } catch (const TraceError& e) {
    EXPECT_EQ(e.step(), 1u);
    EXPECT_EQ(e.code(), ErrorCode::kTokenMismatch);
  }
}

TEST(ApplyAllTest, StopMustBeLast) {
  Trace t = {EditAction::stop(), EditAction::insert(0, "a")};
  EXPECT_THROW(apply_all({}, t), TraceError);
}

TEST(CodecTest, SmallTrace) {
  const Trace t = parse_trace(fixtures::kSmallL2r);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0], EditAction::insert(2, "ist"));
  EXPECT_EQ(t[1], EditAction::remove(4, "ist"));
  EXPECT_TRUE(t[2].is_stop());
  EXPECT_EQ(format_trace(t), fixtures::kSmallL2r);
}

TEST(CodecTest, StopOnly) {
  const Trace t = parse_trace("STOP");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_TRUE(t[0].is_stop());
  EXPECT_EQ(format_trace(t), "STOP");
}

TEST(CodecTest, Errors) {
  EXPECT_THROW(parse_trace("X:1:foo"), Error);
  EXPECT_THROW(parse_trace("I:1"), Error);
  EXPECT_THROW(parse_trace("I:one:foo"), Error);
  EXPECT_THROW(parse_trace("I:-1:foo"), Error);
  EXPECT_THROW(parse_trace("I:1:"), Error);
  EXPECT_THROW(parse_trace("STOP I:0:a"), Error);
}

TEST(CodecTest, TokenMayContainColon) {
  const Trace t = parse_trace("I:0:10:30 STOP");
  EXPECT_EQ(t[0].token, "10:30");
  EXPECT_EQ(format_trace(t), "I:0:10:30 STOP");
}

TEST(CodecTest, RoundTripOnRealizedTraces) {
  std::mt19937 gen(11);
  for (int round = 0; round < 200; ++round) {
    const Sentence mt = random_sentence(gen, 12, 8);
    const Sentence pe = random_sentence(gen, 12, 8);
    const Trace t = l2r_trace(min_edit_script(mt, pe));
    const std::string text = format_trace(t);
    EXPECT_EQ(parse_trace(text), t);
    EXPECT_EQ(format_trace(parse_trace(text)), text);
  }
}

TEST(MinEditScriptTest, SmallExample) {
  const AnchoredScript s =
      min_edit_script(tokenize(fixtures::kSmallMt), tokenize(fixtures::kSmallPe));
  ASSERT_EQ(s.size(), 2u);
  ASSERT_EQ(s.deletions().size(), 1u);
  EXPECT_EQ(s.deletions()[0], (Deletion{3, "ist"}));
  ASSERT_EQ(s.insertions().size(), 1u);
  EXPECT_EQ(s.insertions()[0], (Insertion{2, 0, "ist"}));
}

TEST(MinEditScriptTest, IdentityIsEmpty) {
  const Sentence s = tokenize("a b c");
  EXPECT_TRUE(min_edit_script(s, s).empty());
  EXPECT_TRUE(min_edit_script({}, {}).empty());
}

TEST(MinEditScriptTest, LongExampleHasTwelveItems) {
  const AnchoredScript s =
      min_edit_script(tokenize(fixtures::kLongMt), tokenize(fixtures::kLongPe));
  EXPECT_EQ(s.size(), 12u);
  EXPECT_EQ(s.deletions().size(), 5u);
  EXPECT_EQ(s.insertions().size(), 7u);
}

TEST(MinEditScriptTest, EmptySides) {
  const AnchoredScript ins = min_edit_script({}, {"a", "b"});
  EXPECT_EQ(format_trace(l2r_trace(ins)), "I:0:a I:1:b STOP");
  const AnchoredScript del = min_edit_script({"a", "b"}, {});
  EXPECT_EQ(format_trace(l2r_trace(del)), "D:0:a D:0:b STOP");
}

TEST(MinEditScriptTest, ReplacementReadsDeleteThenInsert) {
  const AnchoredScript s = min_edit_script({"a", "x", "c"}, {"a", "y", "c"});
  EXPECT_EQ(format_trace(l2r_trace(s)), "D:1:x I:1:y STOP");
}

TEST(MinEditScriptTest, MinimalAgainstBruteForce) {
  std::mt19937 gen(5);
  for (int round = 0; round < 400; ++round) {
    const Sentence a = random_sentence(gen, 8, 4);
    const Sentence b = random_sentence(gen, 8, 4);
    const AnchoredScript s = min_edit_script(a, b);
    EXPECT_EQ(s.size(), brute_indel(a, 0, b, 0));
    EXPECT_EQ(indel_distance(a, b), s.size());
    EXPECT_EQ(apply_all(a, l2r_trace(s)), b);
  }
}

TEST(MinEditScriptTest, PreferInsertAlsoMinimal) {
  std::mt19937 gen(9);
  for (int round = 0; round < 200; ++round) {
    const Sentence a = random_sentence(gen, 8, 3);
    const Sentence b = random_sentence(gen, 8, 3);
    const AnchoredScript s = min_edit_script(a, b, TieBreak::kPreferInsert);
    EXPECT_EQ(s.size(), brute_indel(a, 0, b, 0));
    EXPECT_EQ(apply_all(a, l2r_trace(s)), b);
  }
}

TEST(AnchoredScriptTest, RejectsBrokenInvariants) {
  EXPECT_THROW(AnchoredScript(2, {{0, "a"}, {0, "a"}}, {}), Error);
  EXPECT_THROW(AnchoredScript(2, {{2, "a"}}, {}), Error);
  EXPECT_THROW(AnchoredScript(2, {}, {{1, 1, "a"}}), Error);
  EXPECT_THROW(AnchoredScript(2, {}, {{3, 0, "a"}}), Error);
  EXPECT_NO_THROW(AnchoredScript(2, {}, {{2, 0, "a"}, {2, 1, "b"}}));
}

TEST(TokenizeTest, CollapsesSpaces) {
  EXPECT_EQ(tokenize("  a  b "), (Sentence{"a", "b"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_EQ(detokenize({"a", "b"}), "a b");
}

}  // namespace
}  // namespace keyape
