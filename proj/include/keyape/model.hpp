#ifndef KEYAPE_MODEL_HPP
#define KEYAPE_MODEL_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "keyape/decode_result.hpp"
#include "keyape/edit.hpp"
#include "keyape/reorder.hpp"

namespace keyape {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Word vocabulary. Output ids 0 .. size()-1 are UNK followed by the words;
// the input vocabulary appends [SEP], <S> and <T>.
class Vocabulary {
 public:
  static constexpr std::string_view kUnk = "<unk>";

  Vocabulary();
  explicit Vocabulary(std::span<const std::string> words);

  void add(const std::string& word);
  std::size_t id(const std::string& word) const;  // UNK for unknown words
  const std::string& word(std::size_t id) const;
  const std::vector<std::string>& words() const { return words_; }

  std::size_t size() const { return words_.size(); }
  std::size_t input_size() const { return words_.size() + 3; }
  std::size_t sep_id() const { return words_.size(); }
  std::size_t start_id() const { return words_.size() + 1; }
  std::size_t end_id() const { return words_.size() + 2; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

// src + [SEP] + <S> + state + <T>. Segment 0 up to and including [SEP].
struct ModelInput {
  std::vector<std::size_t> ids;
  std::vector<std::size_t> segments;
  // Index of <S>; state word k sits at start + 1 + k.
  std::size_t start = 0;
  std::size_t state_length = 0;

  std::size_t size() const { return ids.size(); }
};

ModelInput make_input(const Vocabulary& vocab, const Sentence& src, const Sentence& state);

// Edit operations are flattened as 2 * j + c over input positions j:
// c = 0 deletes token j, c = 1 inserts after token j. Deleting <T> is STOP.
inline std::size_t delete_op(std::size_t j) { return 2 * j; }
inline std::size_t insert_op(std::size_t j) { return 2 * j + 1; }

// True for the 2m + 2 available operations: deletions of state words, STOP,
// and insertions after <S> or a state word.
std::vector<bool> available_ops(const ModelInput& input);

// Flattened index of a state-relative action (STOP included).
std::size_t op_index(const ModelInput& input, const EditAction& action);
// State-relative action for an available op; `token` is used for insertions.
EditAction op_action(const ModelInput& input, std::size_t op, const std::string& token = {});

struct ModelConfig {
  std::size_t layers = 2;
  std::size_t hidden = 64;
  std::size_t heads = 4;
  std::size_t ffn = 256;
  std::size_t max_positions = 128;
  double dropout = 0.1;
};

enum class ParamGroup { kEncoderWeight, kEncoderOther, kHead };

struct LayerParams {
  Matrix wq, bq, wk, bk, wv, bv, wo, bo;
  Matrix ln1_g, ln1_b;
  Matrix w1, b1, w2, b2;
  Matrix ln2_g, ln2_b;
};

// Weights are (in x out) and applied as X * W + b with b a row vector.
struct ModelParams {
  ModelConfig config;
  Matrix token_emb, segment_emb, position_emb;
  Matrix emb_ln_g, emb_ln_b;
  std::vector<LayerParams> layers;
  Matrix edit_head;   // hidden x 2
  Matrix token_head;  // output vocab x hidden

  void for_each(const std::function<void(const std::string&, Matrix&, ParamGroup)>& f);
  void for_each(
      const std::function<void(const std::string&, const Matrix&, ParamGroup)>& f) const;

  // Same shapes, all zeros.
  ModelParams zeros_like() const;
  std::size_t parameter_count() const;
};

// Normal(0, 0.02) weights and embeddings, zero biases, unit LayerNorm gains.
// Throws Error(kConfiguration) for inconsistent sizes.
ModelParams init_params(const ModelConfig& config, std::size_t input_vocab,
                        std::size_t output_vocab, Rng& rng);

struct LayerCache {
  Matrix x, q, k, v, ctx;
  std::vector<Matrix> attn;
  Matrix drop1, xhat1;
  Vector inv1;
  Matrix x1, pre, act, drop2, xhat2;
  Vector inv2;
};

struct EncodeCache {
  ModelInput input;
  Matrix xhat0, drop0;
  Vector inv0;
  std::vector<LayerCache> layers;
  Matrix h;
};

// Hidden states (N x hidden). Dropout is applied only when `dropout_rng` is
// given. Throws Error(kLength) when the input exceeds the position table.
Matrix encode(const ModelParams& params, const ModelInput& input, EncodeCache* cache = nullptr,
              Rng* dropout_rng = nullptr);

// Accumulates d(loss)/d(params) into `grads` given d(loss)/dH.
void encode_backward(const ModelParams& params, const EncodeCache& cache, const Matrix& dh,
                     ModelParams& grads);

// softmax(flatten(H W)) over available ops; masked ops get exactly 0.
// Throws Error(kImpossibleState) when nothing is available.
Vector edit_op_probs(const ModelParams& params, const Matrix& h,
                     const std::vector<bool>& available);

// softmax(V h_j) for an insertion after input position j. Throws
// Error(kPosition) unless insert_op(j) is available.
Vector token_probs(const ModelParams& params, const Matrix& h, std::size_t j,
                   const std::vector<bool>& available);

// Teacher-forced loss of one (state, gold action) pair: edit-op NLL plus,
// for insertions, the label-smoothed token cross-entropy. Adds
// weight * gradient to `grads` when given. Throws Error(kDataCorruption) if
// the gold action is not available in the state.
double step_loss(const ModelParams& params, const Vocabulary& vocab, const ModelInput& input,
                 const EditAction& gold, double label_smoothing, ModelParams* grads = nullptr,
                 double weight = 1.0, Rng* dropout_rng = nullptr);

// Sum of step losses along the trace from mt, STOP included.
double trace_loss(const ModelParams& params, const Vocabulary& vocab, const Sentence& src,
                  const Sentence& mt, const Trace& trace, double label_smoothing,
                  ModelParams* grads = nullptr);

struct DecodeConfig {
  std::size_t max_actions = 50;
  // On the n-th visit of a state take the n-th most likely action instead of
  // stopping with LOOP; LOOP is then reported only when no such action
  // exists.
  bool nth_best_on_revisit = false;
};

// Greedy decoding from mt. Stops on STOP, on a revisited state (LOOP), after
// max_actions actions or when the state no longer fits the position table
// (CAP). Throws Error(kLength) if the initial input does not fit.
DecodeResult decode(const ModelParams& params, const Vocabulary& vocab, const Sentence& src,
                    const Sentence& mt, const DecodeConfig& config = {});

}  // namespace keyape

#endif  // KEYAPE_MODEL_HPP
