#ifndef KEYAPE_KEYSTROKES_HPP
#define KEYAPE_KEYSTROKES_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "keyape/edit.hpp"

namespace keyape {

// One keystroke as a contiguous replacement: bytes [begin, end) of the old
// state are replaced by `inserted`. Offsets are UTF-8 byte offsets and always
// fall on code point boundaries.
struct CharDelta {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string inserted;

  friend bool operator==(const CharDelta&, const CharDelta&) = default;
};

// Minimal single replacement turning `a` into `b`, found by trimming the
// longest common prefix and then the longest common suffix. Throws
// Error(kNoDelta) when a == b.
CharDelta diff_states(std::string_view a, std::string_view b);

// Full sentence text after every keystroke; states.front() is the mt.
struct KeystrokeLog {
  std::vector<std::string> states;
};

// Checks the log invariants against the tokenized mt and pe: consecutive
// states differ, the first state is mt and the last is pe (single spaces).
// Throws Error(kValidation).
void validate_log(const KeystrokeLog& log, const Sentence& mt, const Sentence& pe);

// Replays a keystroke log into an unfiltered word-level trace (ending in
// STOP).
//
// The word region under edit is tracked as a token window. Keystrokes that
// touch the window extend it; the first keystroke that touches a different
// region, or the end of the log, closes it and emits the net change as DELs
// of the old words followed by INSs of the new ones, left to right. Typing a
// space that splits the edited word into several words also closes the
// window, so a freshly typed word becomes its own INS. Keystrokes that only
// move spaces around (no token change) are ignored.
//
// Throws Error(kReplayDivergence) if the emitted trace does not turn the
// first state into the last one.
Trace replay(const KeystrokeLog& log);

}  // namespace keyape

#endif  // KEYAPE_KEYSTROKES_HPP
