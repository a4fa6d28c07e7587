#include "keyape/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <limits>
#include <numeric>

#include "keyape/error.hpp"

namespace keyape {
namespace {

constexpr double kLayerNormEps = 1e-12;

Matrix add_bias(Matrix x, const Matrix& b) {
  x.rowwise() += b.row(0);
  return x;
}

Matrix layer_norm(const Matrix& x, const Matrix& g, const Matrix& b, Matrix& xhat,
                  Vector& inv_sigma) {
  const Eigen::Index n = x.rows();
  const auto h = static_cast<double>(x.cols());
  xhat.resize(x.rows(), x.cols());
  inv_sigma.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mu = x.row(i).mean();
    const double var = (x.row(i).array() - mu).square().sum() / h;
    inv_sigma(i) = 1.0 / std::sqrt(var + kLayerNormEps);
    xhat.row(i) = (x.row(i).array() - mu) * inv_sigma(i);
  }
  Matrix y = xhat.array().rowwise() * g.row(0).array();
  y.rowwise() += b.row(0);
  return y;
}

Matrix layer_norm_backward(const Matrix& dy, const Matrix& g, const Matrix& xhat,
                           const Vector& inv_sigma, Matrix& dg, Matrix& db) {
  dg += dy.cwiseProduct(xhat).colwise().sum();
  db += dy.colwise().sum();
  const Matrix dxhat = dy.array().rowwise() * g.row(0).array();
  const auto h = static_cast<double>(dy.cols());
  Matrix dx(dy.rows(), dy.cols());
  for (Eigen::Index i = 0; i < dy.rows(); ++i) {
    const double mean_d = dxhat.row(i).mean();
    const double mean_dx = dxhat.row(i).dot(xhat.row(i)) / h;
    dx.row(i) =
        inv_sigma(i) * (dxhat.row(i).array() - mean_d - xhat.row(i).array() * mean_dx).matrix();
  }
  return dx;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

double gelu_grad(double x) {
  constexpr double kInvSqrt2Pi = 0.3989422804014327;
  return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))) + x * kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

// Inverted dropout mask (entries 0 or 1/(1-p)); empty when inactive.
Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, Rng* rng) {
  if (!rng || p <= 0.0) return {};
  Matrix mask(rows, cols);
  const double keep = 1.0 / (1.0 - p);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) mask(i, j) = rng->bernoulli(p) ? 0.0 : keep;
  }
  return mask;
}

Matrix apply_mask(const Matrix& x, const Matrix& mask) {
  return mask.size() == 0 ? x : Matrix(x.cwiseProduct(mask));
}

void softmax_rows(Matrix& s) {
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double mx = s.row(i).maxCoeff();
    s.row(i) = (s.row(i).array() - mx).exp();
    s.row(i) /= s.row(i).sum();
  }
}

Vector softmax(const Vector& logits) {
  const double mx = logits.maxCoeff();
  Vector p = (logits.array() - mx).exp();
  return p / p.sum();
}

Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = 0.02 * rng.normal();
  }
  return m;
}

// Logits of all 2N flattened ops.
Vector flat_edit_logits(const ModelParams& params, const Matrix& h) {
  const Matrix z = h * params.edit_head;  // N x 2
  Vector flat(2 * z.rows());
  for (Eigen::Index j = 0; j < z.rows(); ++j) {
    flat(2 * j) = z(j, 0);
    flat(2 * j + 1) = z(j, 1);
  }
  return flat;
}

}  // namespace

Vocabulary::Vocabulary() { add(std::string(kUnk)); }

Vocabulary::Vocabulary(std::span<const std::string> words) : Vocabulary() {
  for (const std::string& w : words) add(w);
}

void Vocabulary::add(const std::string& word) {
  if (index_.count(word)) return;
  index_.emplace(word, words_.size());
  words_.push_back(word);
}

std::size_t Vocabulary::id(const std::string& word) const {
  const auto it = index_.find(word);
  return it == index_.end() ? 0 : it->second;
}

const std::string& Vocabulary::word(std::size_t id) const { return words_.at(id); }

ModelInput make_input(const Vocabulary& vocab, const Sentence& src, const Sentence& state) {
  ModelInput input;
  for (const std::string& w : src) input.ids.push_back(vocab.id(w));
  input.ids.push_back(vocab.sep_id());
  input.segments.assign(input.ids.size(), 0);
  input.start = input.ids.size();
  input.ids.push_back(vocab.start_id());
  for (const std::string& w : state) input.ids.push_back(vocab.id(w));
  input.ids.push_back(vocab.end_id());
  input.segments.resize(input.ids.size(), 1);
  input.state_length = state.size();
  return input;
}

std::vector<bool> available_ops(const ModelInput& input) {
  std::vector<bool> available(2 * input.size(), false);
  const std::size_t s = input.start;
  const std::size_t m = input.state_length;
  for (std::size_t k = 0; k < m; ++k) available[delete_op(s + 1 + k)] = true;
  for (std::size_t k = 0; k <= m; ++k) available[insert_op(s + k)] = true;
  available[delete_op(s + m + 1)] = true;
  return available;
}

std::size_t op_index(const ModelInput& input, const EditAction& action) {
  const std::size_t s = input.start;
  const std::size_t m = input.state_length;
  switch (action.kind) {
    case ActionKind::kStop:
      return delete_op(s + m + 1);
    case ActionKind::kDelete:
      if (action.position >= m) throw Error(ErrorCode::kPosition, "delete beyond the state");
      return delete_op(s + 1 + action.position);
    case ActionKind::kInsert:
      if (action.position > m) throw Error(ErrorCode::kPosition, "insert beyond the state");
      return insert_op(s + action.position);
  }
  throw Error(ErrorCode::kValidation, "unknown action kind");
}

EditAction op_action(const ModelInput& input, std::size_t op, const std::string& token) {
  const std::vector<bool> available = available_ops(input);
  if (op >= available.size() || !available[op]) {
    throw Error(ErrorCode::kPosition, "operation " + std::to_string(op) + " is masked");
  }
  const std::size_t j = op / 2;
  const std::size_t s = input.start;
  if (op % 2 == 1) return EditAction::insert(j - s, token);
  if (j == s + input.state_length + 1) return EditAction::stop();
  return EditAction{ActionKind::kDelete, j - s - 1, {}};
}

void ModelParams::for_each(
    const std::function<void(const std::string&, Matrix&, ParamGroup)>& f) {
  f("token_emb", token_emb, ParamGroup::kEncoderWeight);
  f("segment_emb", segment_emb, ParamGroup::kEncoderWeight);
  f("position_emb", position_emb, ParamGroup::kEncoderWeight);
  f("emb_ln_g", emb_ln_g, ParamGroup::kEncoderOther);
  f("emb_ln_b", emb_ln_b, ParamGroup::kEncoderOther);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    LayerParams& p = layers[l];
    const std::string pre = "layer" + std::to_string(l) + ".";
    f(pre + "wq", p.wq, ParamGroup::kEncoderWeight);
    f(pre + "bq", p.bq, ParamGroup::kEncoderOther);
    f(pre + "wk", p.wk, ParamGroup::kEncoderWeight);
    f(pre + "bk", p.bk, ParamGroup::kEncoderOther);
    f(pre + "wv", p.wv, ParamGroup::kEncoderWeight);
    f(pre + "bv", p.bv, ParamGroup::kEncoderOther);
    f(pre + "wo", p.wo, ParamGroup::kEncoderWeight);
    f(pre + "bo", p.bo, ParamGroup::kEncoderOther);
    f(pre + "ln1_g", p.ln1_g, ParamGroup::kEncoderOther);
    f(pre + "ln1_b", p.ln1_b, ParamGroup::kEncoderOther);
    f(pre + "w1", p.w1, ParamGroup::kEncoderWeight);
    f(pre + "b1", p.b1, ParamGroup::kEncoderOther);
    f(pre + "w2", p.w2, ParamGroup::kEncoderWeight);
    f(pre + "b2", p.b2, ParamGroup::kEncoderOther);
    f(pre + "ln2_g", p.ln2_g, ParamGroup::kEncoderOther);
    f(pre + "ln2_b", p.ln2_b, ParamGroup::kEncoderOther);
  }
  f("edit_head", edit_head, ParamGroup::kHead);
  f("token_head", token_head, ParamGroup::kHead);
}

void ModelParams::for_each(
    const std::function<void(const std::string&, const Matrix&, ParamGroup)>& f) const {
  const_cast<ModelParams*>(this)->for_each(
      [&](const std::string& name, Matrix& m, ParamGroup g) { f(name, m, g); });
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z = *this;
  z.for_each([](const std::string&, Matrix& m, ParamGroup) { m.setZero(); });
  return z;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for_each([&](const std::string&, const Matrix& m, ParamGroup) {
    n += static_cast<std::size_t>(m.size());
  });
  return n;
}

ModelParams init_params(const ModelConfig& config, std::size_t input_vocab,
                        std::size_t output_vocab, Rng& rng) {
  if (config.hidden == 0 || config.heads == 0 || config.hidden % config.heads != 0) {
    throw Error(ErrorCode::kConfiguration, "hidden size must be a positive multiple of heads");
  }
  if (config.ffn == 0 || config.max_positions == 0 || output_vocab == 0) {
    throw Error(ErrorCode::kConfiguration, "ffn, max_positions and vocabulary must be > 0");
  }
  if (config.dropout < 0.0 || config.dropout >= 1.0) {
    throw Error(ErrorCode::kConfiguration, "dropout must be in [0, 1)");
  }
  const auto h = static_cast<Eigen::Index>(config.hidden);
  const auto f = static_cast<Eigen::Index>(config.ffn);
  ModelParams p;
  p.config = config;
  p.token_emb = normal_matrix(static_cast<Eigen::Index>(input_vocab), h, rng);
  p.segment_emb = normal_matrix(2, h, rng);
  p.position_emb = normal_matrix(static_cast<Eigen::Index>(config.max_positions), h, rng);
  p.emb_ln_g = Matrix::Ones(1, h);
  p.emb_ln_b = Matrix::Zero(1, h);
  for (std::size_t l = 0; l < config.layers; ++l) {
    LayerParams layer;
    layer.wq = normal_matrix(h, h, rng);
    layer.wk = normal_matrix(h, h, rng);
    layer.wv = normal_matrix(h, h, rng);
    layer.wo = normal_matrix(h, h, rng);
    layer.bq = layer.bk = layer.bv = layer.bo = Matrix::Zero(1, h);
    layer.ln1_g = layer.ln2_g = Matrix::Ones(1, h);
    layer.ln1_b = layer.ln2_b = Matrix::Zero(1, h);
    layer.w1 = normal_matrix(h, f, rng);
    layer.b1 = Matrix::Zero(1, f);
    layer.w2 = normal_matrix(f, h, rng);
    layer.b2 = Matrix::Zero(1, h);
    p.layers.push_back(std::move(layer));
  }
  p.edit_head = normal_matrix(h, 2, rng);
  p.token_head = normal_matrix(static_cast<Eigen::Index>(output_vocab), h, rng);
  return p;
}

Matrix encode(const ModelParams& params, const ModelInput& input, EncodeCache* cache,
              Rng* dropout_rng) {
  const ModelConfig& cfg = params.config;
  const auto n = static_cast<Eigen::Index>(input.size());
  if (input.size() > cfg.max_positions) {
    throw Error(ErrorCode::kLength, "input of " + std::to_string(input.size()) +
                                        " tokens exceeds " +
                                        std::to_string(cfg.max_positions) + " positions");
  }
  EncodeCache local;
  EncodeCache& c = cache ? *cache : local;
  c.input = input;
  c.layers.assign(params.layers.size(), {});

  Matrix e(n, params.token_emb.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t id = input.ids[static_cast<std::size_t>(i)];
    if (id >= static_cast<std::size_t>(params.token_emb.rows())) {
      throw Error(ErrorCode::kValidation, "token id outside the embedding table");
    }
    e.row(i) = params.token_emb.row(static_cast<Eigen::Index>(id)) +
               params.segment_emb.row(
                   static_cast<Eigen::Index>(input.segments[static_cast<std::size_t>(i)])) +
               params.position_emb.row(i);
  }
  Matrix x = layer_norm(e, params.emb_ln_g, params.emb_ln_b, c.xhat0, c.inv0);
  c.drop0 = dropout_mask(x.rows(), x.cols(), cfg.dropout, dropout_rng);
  x = apply_mask(x, c.drop0);

  const auto hd = static_cast<Eigen::Index>(cfg.hidden / cfg.heads);
  const double scale = 1.0 / std::sqrt(static_cast<double>(hd));
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const LayerParams& p = params.layers[l];
    LayerCache& lc = c.layers[l];
    lc.x = x;
    lc.q = add_bias(x * p.wq, p.bq);
    lc.k = add_bias(x * p.wk, p.bk);
    lc.v = add_bias(x * p.wv, p.bv);
    lc.ctx.resize(n, x.cols());
    lc.attn.resize(cfg.heads);
    for (std::size_t head = 0; head < cfg.heads; ++head) {
      const Eigen::Index off = static_cast<Eigen::Index>(head) * hd;
      Matrix s = lc.q.middleCols(off, hd) * lc.k.middleCols(off, hd).transpose() * scale;
      softmax_rows(s);
      lc.ctx.middleCols(off, hd) = s * lc.v.middleCols(off, hd);
      lc.attn[head] = std::move(s);
    }
    Matrix o = add_bias(lc.ctx * p.wo, p.bo);
    lc.drop1 = dropout_mask(o.rows(), o.cols(), cfg.dropout, dropout_rng);
    lc.x1 = layer_norm(x + apply_mask(o, lc.drop1), p.ln1_g, p.ln1_b, lc.xhat1, lc.inv1);
    lc.pre = add_bias(lc.x1 * p.w1, p.b1);
    lc.act = lc.pre.unaryExpr([](double v) { return gelu(v); });
    Matrix f = add_bias(lc.act * p.w2, p.b2);
    lc.drop2 = dropout_mask(f.rows(), f.cols(), cfg.dropout, dropout_rng);
    x = layer_norm(lc.x1 + apply_mask(f, lc.drop2), p.ln2_g, p.ln2_b, lc.xhat2, lc.inv2);
  }
  c.h = x;
  return x;
}

void encode_backward(const ModelParams& params, const EncodeCache& c, const Matrix& dh,
                     ModelParams& grads) {
  const ModelConfig& cfg = params.config;
  const auto hd = static_cast<Eigen::Index>(cfg.hidden / cfg.heads);
  const double scale = 1.0 / std::sqrt(static_cast<double>(hd));
  Matrix dx = dh;
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const LayerParams& p = params.layers[l];
    LayerParams& g = grads.layers[l];
    const LayerCache& lc = c.layers[l];

    const Matrix dsum2 = layer_norm_backward(dx, p.ln2_g, lc.xhat2, lc.inv2, g.ln2_g, g.ln2_b);
    const Matrix df = apply_mask(dsum2, lc.drop2);
    g.w2 += lc.act.transpose() * df;
    g.b2 += df.colwise().sum();
    Matrix dpre = df * p.w2.transpose();
    dpre = dpre.cwiseProduct(lc.pre.unaryExpr([](double v) { return gelu_grad(v); }));
    g.w1 += lc.x1.transpose() * dpre;
    g.b1 += dpre.colwise().sum();
    const Matrix dx1 = dsum2 + dpre * p.w1.transpose();

    const Matrix dsum1 = layer_norm_backward(dx1, p.ln1_g, lc.xhat1, lc.inv1, g.ln1_g, g.ln1_b);
    const Matrix dout = apply_mask(dsum1, lc.drop1);
    g.wo += lc.ctx.transpose() * dout;
    g.bo += dout.colwise().sum();
    const Matrix dctx = dout * p.wo.transpose();

    Matrix dq(lc.q.rows(), lc.q.cols());
    Matrix dk(lc.k.rows(), lc.k.cols());
    Matrix dv(lc.v.rows(), lc.v.cols());
    for (std::size_t head = 0; head < cfg.heads; ++head) {
      const Eigen::Index off = static_cast<Eigen::Index>(head) * hd;
      const Matrix& a = lc.attn[head];
      const Matrix dctx_h = dctx.middleCols(off, hd);
      const Matrix da = dctx_h * lc.v.middleCols(off, hd).transpose();
      dv.middleCols(off, hd) = a.transpose() * dctx_h;
      const Vector row_dot = da.cwiseProduct(a).rowwise().sum();
      Matrix ds = a.cwiseProduct(da.colwise() - row_dot) * scale;
      dq.middleCols(off, hd) = ds * lc.k.middleCols(off, hd);
      dk.middleCols(off, hd) = ds.transpose() * lc.q.middleCols(off, hd);
    }
    g.wq += lc.x.transpose() * dq;
    g.bq += dq.colwise().sum();
    g.wk += lc.x.transpose() * dk;
    g.bk += dk.colwise().sum();
    g.wv += lc.x.transpose() * dv;
    g.bv += dv.colwise().sum();
    dx = dsum1 + dq * p.wq.transpose() + dk * p.wk.transpose() + dv * p.wv.transpose();
  }

  const Matrix de = layer_norm_backward(apply_mask(dx, c.drop0), params.emb_ln_g, c.xhat0,
                                        c.inv0, grads.emb_ln_g, grads.emb_ln_b);
  for (Eigen::Index i = 0; i < de.rows(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    grads.token_emb.row(static_cast<Eigen::Index>(c.input.ids[idx])) += de.row(i);
    grads.segment_emb.row(static_cast<Eigen::Index>(c.input.segments[idx])) += de.row(i);
    grads.position_emb.row(i) += de.row(i);
  }
}

Vector edit_op_probs(const ModelParams& params, const Matrix& h,
                     const std::vector<bool>& available) {
  const Vector logits = flat_edit_logits(params, h);
  if (available.size() != static_cast<std::size_t>(logits.size())) {
    throw Error(ErrorCode::kValidation, "mask size does not match the input");
  }
  double mx = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    if (!available[static_cast<std::size_t>(i)]) continue;
    any = true;
    if (!std::isfinite(logits(i))) throw Error(ErrorCode::kNonFinite, "non-finite edit logit");
    mx = std::max(mx, logits(i));
  }
  if (!any) throw Error(ErrorCode::kImpossibleState, "every edit operation is masked");
  Vector p = Vector::Zero(logits.size());
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    if (available[static_cast<std::size_t>(i)]) p(i) = std::exp(logits(i) - mx);
  }
  return p / p.sum();
}

Vector token_probs(const ModelParams& params, const Matrix& h, std::size_t j,
                   const std::vector<bool>& available) {
  if (insert_op(j) >= available.size() || !available[insert_op(j)]) {
    throw Error(ErrorCode::kPosition,
                "insertion after input position " + std::to_string(j) + " is masked");
  }
  return softmax(params.token_head * h.row(static_cast<Eigen::Index>(j)).transpose());
}

double step_loss(const ModelParams& params, const Vocabulary& vocab, const ModelInput& input,
                 const EditAction& gold, double label_smoothing, ModelParams* grads,
                 double weight, Rng* dropout_rng) {
  const std::vector<bool> available = available_ops(input);
  std::size_t target;
  try {
    target = op_index(input, gold);
  } catch (const Error&) {
    throw Error(ErrorCode::kDataCorruption,
                "gold action " + format_action(gold) + " is not available");
  }
  if (!available[target]) {
    throw Error(ErrorCode::kDataCorruption,
                "gold action " + format_action(gold) + " is masked");
  }
  EncodeCache cache;
  const Matrix h = encode(params, input, grads ? &cache : nullptr, dropout_rng);
  const Vector p = edit_op_probs(params, h, available);
  double loss = -std::log(p(static_cast<Eigen::Index>(target)));

  Matrix dh;
  if (grads) {
    // d loss / d flat logits = p - onehot on available ops (p is 0 elsewhere).
    Vector dflat = p;
    dflat(static_cast<Eigen::Index>(target)) -= 1.0;
    dflat *= weight;
    Matrix dz(h.rows(), 2);
    for (Eigen::Index j = 0; j < h.rows(); ++j) {
      dz(j, 0) = dflat(2 * j);
      dz(j, 1) = dflat(2 * j + 1);
    }
    grads->edit_head += h.transpose() * dz;
    dh = dz * params.edit_head.transpose();
  }

  if (gold.kind == ActionKind::kInsert) {
    const std::size_t j = target / 2;
    const Vector q = token_probs(params, h, j, available);
    const auto v = static_cast<double>(q.size());
    const auto gold_id = static_cast<Eigen::Index>(vocab.id(gold.token));
    Vector smooth = Vector::Constant(q.size(), label_smoothing / v);
    smooth(gold_id) += 1.0 - label_smoothing;
    loss -= smooth.dot(q.array().log().matrix());
    if (grads) {
      const Vector dl = (q - smooth) * weight;
      const auto row = static_cast<Eigen::Index>(j);
      grads->token_head += dl * h.row(row);
      dh.row(row) += (params.token_head.transpose() * dl).transpose();
    }
  }
  if (grads) encode_backward(params, cache, dh, *grads);
  return loss;
}

double trace_loss(const ModelParams& params, const Vocabulary& vocab, const Sentence& src,
                  const Sentence& mt, const Trace& trace, double label_smoothing,
                  ModelParams* grads) {
  Sentence state = mt;
  double total = 0.0;
  for (const EditAction& action : trace) {
    total += step_loss(params, vocab, make_input(vocab, src, state), action, label_smoothing,
                       grads);
    if (action.is_stop()) break;
    apply_in_place(state, action);
  }
  return total;
}

DecodeResult decode(const ModelParams& params, const Vocabulary& vocab, const Sentence& src,
                    const Sentence& mt, const DecodeConfig& config) {
  DecodeResult result;
  Sentence state = mt;
  std::map<Sentence, std::size_t> visits{{state, 1}};
  for (;;) {
    if (result.steps >= config.max_actions) {
      result.stop_reason = StopReason::kCap;
      break;
    }
    const ModelInput input = make_input(vocab, src, state);
    if (input.size() > params.config.max_positions && result.steps > 0) {
      result.stop_reason = StopReason::kCap;
      break;
    }
    const Matrix h = encode(params, input);
    const std::vector<bool> available = available_ops(input);
    const Vector p = edit_op_probs(params, h, available);

    std::vector<std::size_t> ranked;
    for (std::size_t op = 0; op < available.size(); ++op) {
      if (available[op]) ranked.push_back(op);
    }
    const std::size_t rank = config.nth_best_on_revisit ? visits[state] : 1;
    if (rank > ranked.size()) {
      result.stop_reason = StopReason::kLoop;
      break;
    }
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(rank),
                      ranked.end(), [&](std::size_t a, std::size_t b) {
                        const double pa = p(static_cast<Eigen::Index>(a));
                        const double pb = p(static_cast<Eigen::Index>(b));
                        return pa != pb ? pa > pb : a < b;
                      });
    const std::size_t op = ranked[rank - 1];

    std::string token;
    if (op % 2 == 1) {
      const Vector q = token_probs(params, h, op / 2, available);
      Eigen::Index best;
      q.maxCoeff(&best);
      token = vocab.word(static_cast<std::size_t>(best));
    }
    EditAction action = op_action(input, op, token);
    if (action.is_stop()) {
      result.trace.push_back(action);
      result.stop_reason = StopReason::kStop;
      break;
    }
    if (action.kind == ActionKind::kDelete) action.token = state[action.position];
    apply_in_place(state, action);
    result.trace.push_back(action);
    ++result.steps;
    if (visits[state]++ > 0 && !config.nth_best_on_revisit) {
      result.stop_reason = StopReason::kLoop;
      break;
    }
  }
  result.final = std::move(state);
  return result;
}

}  // namespace keyape
