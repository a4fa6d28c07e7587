#include "keyape/keystrokes.hpp"

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "keyape/error.hpp"
#include "keyape/reorder.hpp"
#include "keyape/synthetic.hpp"

namespace keyape {
namespace {

KeystrokeLog small_example_log() {
  return {{
      "Die LMS geöffnet ist .",
      "Die LMS igeöffnet ist .",
      "Die LMS isgeöffnet ist .",
      "Die LMS istgeöffnet ist .",
      "Die LMS ist geöffnet ist .",
      "Die LMS ist geöffnet is .",
      "Die LMS ist geöffnet i .",
      "Die LMS ist geöffnet  .",
      "Die LMS ist geöffnet .",
  }};
}

TEST(DiffStatesTest, InsertInsideWord) {
  const CharDelta d = diff_states("Die LMS geöffnet", "Die LMSx geöffnet");
  EXPECT_EQ(d, (CharDelta{7, 7, "x"}));
}

TEST(DiffStatesTest, SingleCharDelete) {
  EXPECT_EQ(diff_states("ab", "b"), (CharDelta{0, 1, ""}));
}

TEST(DiffStatesTest, Replacement) {
  EXPECT_EQ(diff_states("a b c", "a B c"), (CharDelta{2, 3, "B"}));
}

TEST(DiffStatesTest, SnapsToCodePoints) {
  // "ö" and "ü" share their first UTF-8 byte.
  const CharDelta d = diff_states("göt", "güt");
  EXPECT_EQ(d.begin, 1u);
  EXPECT_EQ(d.end, 3u);
  EXPECT_EQ(d.inserted, "ü");
}

TEST(DiffStatesTest, IdenticalStatesThrow) {
  try {
    diff_states("a", "a");
    FAIL() << "expected no-delta";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoDelta);
  }
}

TEST(ReplayTest, SmallExample) {
  EXPECT_EQ(format_trace(replay(small_example_log())), fixtures::kSmallL2r);
}

TEST(ReplayTest, NoKeystrokes) {
  EXPECT_EQ(format_trace(replay({{"a b"}})), "STOP");
}

TEST(ReplayTest, RedundantPairIsKept) {
  const KeystrokeLog log{{"a b", "ta b", "t a b", " a b", "a b"}};
  const Trace trace = replay(log);
  EXPECT_EQ(format_trace(trace), "I:0:t D:0:t STOP");
  EXPECT_EQ(apply_all({"a", "b"}, trace), (Sentence{"a", "b"}));
}

TEST(ReplayTest, ChangedWordIsDeleteThenInsert) {
  const KeystrokeLog log{{"a bat c", "a ba c", "a b c", "a bu c", "a bus c"}};
  EXPECT_EQ(format_trace(replay(log)), "D:1:bat I:1:bus STOP");
}

TEST(ReplayTest, BlockChangeLeftToRight) {
  const KeystrokeLog log{{"a b c", "x c"}};
  EXPECT_EQ(format_trace(replay(log)), "D:0:a D:0:b I:0:x STOP");
}

TEST(ReplayTest, SpaceOnlyEditsAreIgnored) {
  const KeystrokeLog log{{"a b", "a  b", "a b"}};
  EXPECT_EQ(format_trace(replay(log)), "STOP");
}

TEST(ReplayTest, RepeatedStatePropagatesNoDelta) {
  EXPECT_THROW(replay({{"a", "a"}}), Error);
}

TEST(ValidateLogTest, Endpoints) {
  const Sentence mt = tokenize(fixtures::kSmallMt);
  const Sentence pe = tokenize(fixtures::kSmallPe);
  EXPECT_NO_THROW(validate_log(small_example_log(), mt, pe));
  KeystrokeLog truncated = small_example_log();
  truncated.states.pop_back();
  EXPECT_THROW(validate_log(truncated, mt, pe), Error);
  EXPECT_THROW(validate_log({{"a", "a"}}, {"a"}, {"a"}), Error);
  EXPECT_THROW(validate_log({}, mt, pe), Error);
}

TEST(ReplayProperty, SynthesizedLogsReachPe) {
  Rng rng(11);
  TypingOptions messy{0.3, 0.2, 0.3};
  for (int n = 0; n < 300; ++n) {
    const Sentence mt = random_sentence(rng, 12, 1, 12);
    const Sentence pe = random_post_edit(mt, rng, 12, 1 + rng.uniform(5));
    const AnchoredScript script = min_edit_script(mt, pe);
    const Trace trace = realize(script, Permutation::random(script.size(), rng));
    const KeystrokeLog log = synthesize_log(mt, trace, rng, messy);
    ASSERT_NO_THROW(validate_log(log, mt, pe));
    const Trace human = replay(log);
    EXPECT_EQ(apply_all(mt, human), pe) << format_trace(trace);
    EXPECT_GE(action_count(human), script.size());
  }
}

TEST(ReplayProperty, CleanLogsRecoverTheTrace) {
  Rng rng(12);
  int checked = 0;
  while (checked < 200) {
    const Sentence mt = random_sentence(rng, 30, 2, 15);
    const Sentence pe = random_post_edit(mt, rng, 30, 1 + rng.uniform(4));
    const AnchoredScript script = min_edit_script(mt, pe);
    const Trace trace = realize(script, Permutation::random(script.size(), rng));
    if (!well_separated(mt, trace)) continue;
    const KeystrokeLog log = synthesize_log(mt, trace, rng, {0.0, 0.3, 0.3});
    EXPECT_EQ(format_trace(replay(log)), format_trace(trace));
    ++checked;
  }
}

}  // namespace
}  // namespace keyape
