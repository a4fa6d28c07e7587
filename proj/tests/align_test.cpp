#include "keyape/align.hpp"

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "keyape/error.hpp"
#include "keyape/keystrokes.hpp"
#include "keyape/synthetic.hpp"

namespace keyape {
namespace {

TEST(AlignTest, LongExampleHumanOrder) {
  const Sentence mt = tokenize(fixtures::kLongMt);
  const AnchoredScript script = min_edit_script(mt, tokenize(fixtures::kLongPe));
  const Trace human = parse_trace(fixtures::kLongHuman);
  const Alignment alignment = align_human(mt, script, human);
  ASSERT_TRUE(alignment.aligned());
  EXPECT_EQ(format_trace(human_ordered_trace(script, alignment)), fixtures::kLongHord);
}

TEST(AlignTest, LeftToRightIsIdentity) {
  const Sentence mt = tokenize(fixtures::kLongMt);
  const AnchoredScript script = min_edit_script(mt, tokenize(fixtures::kLongPe));
  const Alignment alignment = align_human(mt, script, l2r_trace(script));
  ASSERT_TRUE(alignment.aligned());
  for (std::size_t k = 0; k < script.size(); ++k) EXPECT_EQ(alignment.rank[k], k);
  EXPECT_EQ(human_ordered_trace(script, alignment), l2r_trace(script));
}

TEST(AlignTest, MovingTheOtherWordFallsBack) {
  const Sentence mt = tokenize(fixtures::kSmallMt);
  const AnchoredScript script = min_edit_script(mt, tokenize(fixtures::kSmallPe));
  const Trace human = parse_trace("D:2:geöffnet I:3:geöffnet STOP");
  const Alignment alignment = align_human(mt, script, human);
  EXPECT_FALSE(alignment.aligned());
  EXPECT_THROW(human_ordered_trace(script, alignment), Error);
}

TEST(AlignTest, RedundantPairDoesNotChangeRanks) {
  const Sentence mt = tokenize(fixtures::kLongMt);
  const AnchoredScript script = min_edit_script(mt, tokenize(fixtures::kLongPe));
  const Trace human = parse_trace(fixtures::kLongHuman);
  Trace padded = {EditAction::insert(0, "zz"), EditAction::remove(0, "zz")};
  padded.insert(padded.end(), human.begin(), human.end());
  EXPECT_EQ(align_human(mt, script, padded).rank, align_human(mt, script, human).rank);
}

TEST(AlignTest, InvalidHumanTracePropagates) {
  const Sentence mt = tokenize(fixtures::kSmallMt);
  const AnchoredScript script = min_edit_script(mt, tokenize(fixtures::kSmallPe));
  EXPECT_THROW(align_human(mt, script, parse_trace("D:0:nope STOP")), TraceError);
}

TEST(AlignProperty, SyntheticEditorsReachPe) {
  CorpusOptions options;
  options.samples = 300;
  options.vocab = 20;
  options.typing = {0.3, 0.1, 0.2};
  options.seed = 5;
  const SyntheticCorpus corpus = synthetic_corpus(options);
  for (const Sample& s : corpus.samples) {
    const AnchoredScript script = min_edit_script(s.mt, s.pe);
    const Alignment alignment = align_human(s.mt, script, replay(*s.keystrokes));
    ASSERT_TRUE(alignment.aligned()) << s.id;
    EXPECT_EQ(apply_all(s.mt, human_ordered_trace(script, alignment)), s.pe);
  }
}

}  // namespace
}  // namespace keyape
