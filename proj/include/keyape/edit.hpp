#ifndef KEYAPE_EDIT_HPP
#define KEYAPE_EDIT_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace keyape {

// A sentence is a sequence of whitespace-free tokens.
using Sentence = std::vector<std::string>;

// Splits on spaces, dropping empty pieces (intermediate keystroke states may
// carry double or trailing spaces).
Sentence tokenize(std::string_view text);
std::string detokenize(const Sentence& tokens);

enum class ActionKind { kInsert, kDelete, kStop };

// One atomic word-level edit. Positions are 0-based and relative to the
// sentence the action is applied to. An insertion at p makes the new token
// occupy index p (insert-before).
struct EditAction {
  ActionKind kind = ActionKind::kStop;
  std::size_t position = 0;
  std::string token;

  static EditAction insert(std::size_t position, std::string token) {
    return {ActionKind::kInsert, position, std::move(token)};
  }
  static EditAction remove(std::size_t position, std::string token) {
    return {ActionKind::kDelete, position, std::move(token)};
  }
  static EditAction stop() { return {}; }

  bool is_stop() const { return kind == ActionKind::kStop; }

  friend bool operator==(const EditAction&, const EditAction&) = default;
};

// An ordered sequence of state-relative actions, normally ending in STOP.
using Trace = std::vector<EditAction>;

void apply_in_place(Sentence& sentence, const EditAction& action);
Sentence apply_action(const Sentence& sentence, const EditAction& action);

// Left fold of apply. STOP may only appear as the last element. Failures are
// rethrown as TraceError carrying the failing step.
Sentence apply_all(const Sentence& sentence, const Trace& trace);

// Number of non-STOP actions.
std::size_t action_count(const Trace& trace);

// --- Action text format -----------------------------------------------------
//
//   I:<pos>:<token>   D:<pos>:<token>   STOP
//
// separated by single spaces. The token is everything after the second colon,
// so tokens may themselves contain colons.

std::string format_action(const EditAction& action);
std::string format_trace(const Trace& trace);
EditAction parse_action(std::string_view text);
Trace parse_trace(std::string_view text);

// --- Anchored (order-independent) scripts -----------------------------------

struct Deletion {
  std::size_t index = 0;  // index in the original mt
  std::string token;
  friend bool operator==(const Deletion&, const Deletion&) = default;
};

struct Insertion {
  std::size_t gap = 0;      // 0..len(mt); the token lands before mt[gap]
  std::size_t ordinal = 0;  // rank among insertions sharing the gap
  std::string token;
  friend bool operator==(const Insertion&, const Insertion&) = default;
};

// One element of a script, addressed uniformly. `anchor` is the deleted index
// for deletions and the gap for insertions.
struct ScriptItem {
  ActionKind kind = ActionKind::kDelete;
  std::size_t anchor = 0;
  std::size_t ordinal = 0;
  std::string token;
  friend bool operator==(const ScriptItem&, const ScriptItem&) = default;
};

// A redundancy-free edit script in original-mt coordinates. Any execution
// order of its items, realized with rectified positions, turns mt into pe.
class AnchoredScript {
 public:
  AnchoredScript() = default;
  // Validates the anchoring invariants; throws Error(kValidation).
  AnchoredScript(std::size_t source_length, std::vector<Deletion> deletions,
                 std::vector<Insertion> insertions);

  std::size_t source_length() const { return source_length_; }
  const std::vector<Deletion>& deletions() const { return deletions_; }
  const std::vector<Insertion>& insertions() const { return insertions_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  // Items in canonical left-to-right order: ascending anchor, a deletion
  // before an insertion sharing the anchor, then ascending ordinal.
  // Permutations index into this list.
  const std::vector<ScriptItem>& items() const { return items_; }

  friend bool operator==(const AnchoredScript&, const AnchoredScript&) = default;

 private:
  std::size_t source_length_ = 0;
  std::vector<Deletion> deletions_;
  std::vector<Insertion> insertions_;
  std::vector<ScriptItem> items_;
};

// Which operation the DP backtrace takes when deletion and insertion are both
// optimal. The library default is kPreferDelete; the alternative exists for
// generating deliberately different minimal scripts in tests and tools.
enum class TieBreak { kPreferDelete, kPreferInsert };

// Minimal insert/delete script (a substitution costs one DEL plus one INS).
// The backtrace walks from the end of both sentences, takes a match whenever
// the tokens agree, otherwise prefers deletion. Insertions are then anchored
// after any deleted tokens that directly follow them.
AnchoredScript min_edit_script(const Sentence& mt, const Sentence& pe,
                               TieBreak tie_break = TieBreak::kPreferDelete);

// Insert/delete edit distance (substitution cost 2) by plain DP.
std::size_t indel_distance(const Sentence& a, const Sentence& b);

}  // namespace keyape

#endif  // KEYAPE_EDIT_HPP
