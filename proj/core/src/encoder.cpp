// Copyright 2026 The mpbert Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mpbert/encoder.hpp"

#include <algorithm>
#include <cmath>

#include "mpbert/errors.hpp"
#include "mpbert/rng.hpp"

namespace mpbert {
namespace {

constexpr double kLayerNormEps = 1e-5;
constexpr double kInitStd = 0.02;

using Index = Eigen::Index;

// ---------------------------------------------------------------------------
// Parameter bookkeeping

template <typename Params, typename Fn>
void visit_impl(Params& p, Fn&& fn) {
  fn("embeddings.phoneme", p.embeddings.phoneme);
  fn("embeddings.sup", p.embeddings.sup);
  fn("embeddings.position", p.embeddings.position);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    auto& L = p.layers[l];
    const std::string prefix = "layers." + std::to_string(l) + ".";
    fn(prefix + "attn.wq", L.wq);
    fn(prefix + "attn.bq", L.bq);
    fn(prefix + "attn.wk", L.wk);
    fn(prefix + "attn.bk", L.bk);
    fn(prefix + "attn.wv", L.wv);
    fn(prefix + "attn.bv", L.bv);
    fn(prefix + "attn.wo", L.wo);
    fn(prefix + "attn.bo", L.bo);
    fn(prefix + "ln1.gain", L.ln1_gain);
    fn(prefix + "ln1.bias", L.ln1_bias);
    fn(prefix + "conv1.weight", L.conv1_w);
    fn(prefix + "conv1.bias", L.conv1_b);
    fn(prefix + "conv2.weight", L.conv2_w);
    fn(prefix + "conv2.bias", L.conv2_b);
    fn(prefix + "ln2.gain", L.ln2_gain);
    fn(prefix + "ln2.bias", L.ln2_bias);
  }
  fn("head.phoneme.weight", p.phoneme_head_w);
  fn("head.phoneme.bias", p.phoneme_head_b);
  fn("head.sup.weight", p.sup_head_w);
  fn("head.sup.bias", p.sup_head_b);
}

bool is_gain(const std::string& name) { return name.ends_with(".gain"); }
bool is_bias(const std::string& name) {
  return name.ends_with(".bias") || name.ends_with(".bq") || name.ends_with(".bk") ||
         name.ends_with(".bv") || name.ends_with(".bo");
}

// ---------------------------------------------------------------------------
// Building blocks

void layer_norm_forward(const Matrix& x, const Matrix& gain, const Matrix& bias, Matrix& xhat,
                        Eigen::VectorXd& inv_std, Matrix& out) {
  const Index T = x.rows();
  const auto H = static_cast<double>(x.cols());
  xhat.resize(T, x.cols());
  inv_std.resize(T);
  for (Index t = 0; t < T; ++t) {
    const double mean = x.row(t).sum() / H;
    const auto centered = (x.row(t).array() - mean).matrix();
    const double var = centered.squaredNorm() / H;
    inv_std(t) = 1.0 / std::sqrt(var + kLayerNormEps);
    xhat.row(t) = centered * inv_std(t);
  }
  out = (xhat.array().rowwise() * gain.row(0).array()).rowwise() + bias.row(0).array();
}

// Returns d(input); accumulates gain/bias gradients.
Matrix layer_norm_backward(const Matrix& dout, const Matrix& xhat, const Eigen::VectorXd& inv_std,
                           const Matrix& gain, Matrix& dgain, Matrix& dbias) {
  dgain.row(0) += (dout.array() * xhat.array()).colwise().sum().matrix();
  dbias.row(0) += dout.colwise().sum();
  const Matrix dxhat = dout.array().rowwise() * gain.row(0).array();
  const auto H = static_cast<double>(dout.cols());
  Matrix dx(dout.rows(), dout.cols());
  for (Index t = 0; t < dout.rows(); ++t) {
    const double mean_d = dxhat.row(t).sum() / H;
    const double mean_dx = dxhat.row(t).dot(xhat.row(t)) / H;
    dx.row(t) = inv_std(t) * (dxhat.row(t).array() - mean_d - xhat.row(t).array() * mean_dx).matrix();
  }
  return dx;
}

// "Same"-padded 1-D convolution over rows. weight: (k * Cin) x Cout.
Matrix conv_forward(const Matrix& x, const Matrix& weight, const Matrix& bias, Index k) {
  const Index T = x.rows();
  const Index cin = x.cols();
  const Index pad = (k - 1) / 2;
  Matrix out = bias.replicate(T, 1);
  for (Index tap = 0; tap < k; ++tap) {
    const Index offset = tap - pad;
    const Index t0 = std::max<Index>(0, -offset);
    const Index t1 = std::min<Index>(T, T - offset);
    if (t1 <= t0) continue;
    out.middleRows(t0, t1 - t0).noalias() +=
        x.middleRows(t0 + offset, t1 - t0) * weight.middleRows(tap * cin, cin);
  }
  return out;
}

Matrix conv_backward(const Matrix& dout, const Matrix& x, const Matrix& weight, Index k,
                     Matrix& dweight, Matrix& dbias) {
  const Index T = x.rows();
  const Index cin = x.cols();
  const Index pad = (k - 1) / 2;
  dbias.row(0) += dout.colwise().sum();
  Matrix dx = Matrix::Zero(T, cin);
  for (Index tap = 0; tap < k; ++tap) {
    const Index offset = tap - pad;
    const Index t0 = std::max<Index>(0, -offset);
    const Index t1 = std::min<Index>(T, T - offset);
    if (t1 <= t0) continue;
    dweight.middleRows(tap * cin, cin).noalias() +=
        x.middleRows(t0 + offset, t1 - t0).transpose() * dout.middleRows(t0, t1 - t0);
    dx.middleRows(t0 + offset, t1 - t0).noalias() +=
        dout.middleRows(t0, t1 - t0) * weight.middleRows(tap * cin, cin).transpose();
  }
  return dx;
}

Matrix dropout_scale(Index rows, Index cols, double p, Rng& rng) {
  Matrix keep(rows, cols);
  const double scale = 1.0 / (1.0 - p);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) keep(i, j) = rng.uniform() < p ? 0.0 : scale;
  }
  return keep;
}

void softmax_rows(Matrix& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    const double mx = m.row(r).maxCoeff();
    m.row(r) = (m.row(r).array() - mx).exp().matrix();
    m.row(r) /= m.row(r).sum();
  }
}

// Mean cross-entropy of rows vs targets; writes softmax probabilities into probs.
double cross_entropy(const Matrix& logits, const std::vector<std::int32_t>& targets,
                     Matrix& probs, std::size_t& correct) {
  probs = logits;
  softmax_rows(probs);
  double loss = 0.0;
  correct = 0;
  for (Index r = 0; r < logits.rows(); ++r) {
    const double mx = logits.row(r).maxCoeff();
    const double lse = mx + std::log((logits.row(r).array() - mx).exp().sum());
    loss += lse - logits(r, targets[static_cast<std::size_t>(r)]);
    Index arg = 0;
    logits.row(r).maxCoeff(&arg);
    correct += arg == targets[static_cast<std::size_t>(r)];
  }
  return logits.rows() ? loss / static_cast<double>(logits.rows()) : 0.0;
}

// Positions pooled for sup token j: its masked positions, or the whole span if none.
std::vector<std::size_t> pooled_positions(const MaskedExample& ex, std::size_t j) {
  const auto& span = ex.sup_spans[j];
  std::vector<std::size_t> rows;
  for (std::size_t t = span.start; t < span.end; ++t) {
    if (ex.pos_masked[t]) rows.push_back(t);
  }
  if (rows.empty()) {
    for (std::size_t t = span.start; t < span.end; ++t) rows.push_back(t);
  }
  return rows;
}

}  // namespace

// ---------------------------------------------------------------------------
// EncoderParams

void EncoderParams::visit(const std::function<void(const std::string&, Matrix&)>& fn) {
  visit_impl(*this, fn);
}

void EncoderParams::visit(const std::function<void(const std::string&, const Matrix&)>& fn) const {
  visit_impl(*this, fn);
}

std::size_t EncoderParams::parameter_count() const {
  std::size_t n = 0;
  visit([&n](const std::string&, const Matrix& m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

bool EncoderParams::all_finite() const {
  bool ok = true;
  visit([&ok](const std::string&, const Matrix& m) { ok = ok && m.allFinite(); });
  return ok;
}

std::vector<TensorShape> param_shapes(const ModelConfig& c) {
  const std::size_t H = c.hidden, F = c.ff_filter;
  std::vector<TensorShape> shapes = {
      {"embeddings.phoneme", c.phoneme_vocab, H},
      {"embeddings.sup", c.sup_vocab, H},
      {"embeddings.position", c.max_len, H},
  };
  for (std::size_t l = 0; l < c.layers; ++l) {
    const std::string p = "layers." + std::to_string(l) + ".";
    for (const char* proj : {"q", "k", "v", "o"}) {
      shapes.push_back({p + "attn.w" + proj, H, H});
      shapes.push_back({p + "attn.b" + proj, 1, H});
    }
    shapes.push_back({p + "ln1.gain", 1, H});
    shapes.push_back({p + "ln1.bias", 1, H});
    shapes.push_back({p + "conv1.weight", c.ff_kernel1 * H, F});
    shapes.push_back({p + "conv1.bias", 1, F});
    shapes.push_back({p + "conv2.weight", c.ff_kernel2 * F, H});
    shapes.push_back({p + "conv2.bias", 1, H});
    shapes.push_back({p + "ln2.gain", 1, H});
    shapes.push_back({p + "ln2.bias", 1, H});
  }
  shapes.push_back({"head.phoneme.weight", H, c.phoneme_vocab});
  shapes.push_back({"head.phoneme.bias", 1, c.phoneme_vocab});
  shapes.push_back({"head.sup.weight", H, c.sup_vocab});
  shapes.push_back({"head.sup.bias", 1, c.sup_vocab});
  return shapes;
}

EncoderParams zero_params(const ModelConfig& config) {
  config.validate();
  EncoderParams p;
  p.layers.resize(config.layers);
  const auto shapes = param_shapes(config);
  std::size_t i = 0;
  p.visit([&](const std::string&, Matrix& m) {
    m = Matrix::Zero(static_cast<Index>(shapes[i].rows), static_cast<Index>(shapes[i].cols));
    ++i;
  });
  return p;
}

EncoderParams init_params(const ModelConfig& config, std::uint64_t seed) {
  EncoderParams p = zero_params(config);
  Rng rng(seed);
  p.visit([&](const std::string& name, Matrix& m) {
    if (is_gain(name)) {
      m.setOnes();
    } else if (!is_bias(name)) {
      for (Index i = 0; i < m.size(); ++i) m.data()[i] = kInitStd * rng.normal();
    }
  });
  return p;
}

void check_shapes(const EncoderParams& params, const ModelConfig& config) {
  if (params.layers.size() != config.layers) {
    throw ConfigError("expected " + std::to_string(config.layers) + " layers, found " +
                      std::to_string(params.layers.size()));
  }
  const auto shapes = param_shapes(config);
  std::size_t i = 0;
  params.visit([&](const std::string& name, const Matrix& m) {
    const auto& s = shapes[i++];
    if (static_cast<std::size_t>(m.rows()) != s.rows || static_cast<std::size_t>(m.cols()) != s.cols) {
      throw ConfigError("tensor " + name + " has shape " + std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()) + ", expected " + std::to_string(s.rows) + "x" +
                        std::to_string(s.cols));
    }
  });
}

// ---------------------------------------------------------------------------
// Forward

Matrix encoder_forward(const std::vector<PhonemeId>& phoneme_ids,
                       const std::vector<SupPhonemeId>& sup_ids, const EncoderParams& params,
                       const ModelConfig& config, bool train_mode, std::uint64_t dropout_seed,
                       ForwardCache* cache) {
  if (phoneme_ids.size() > config.max_len) throw SequenceTooLong(phoneme_ids.size(), config.max_len);
  const bool dropout = train_mode && config.dropout > 0.0;
  Rng rng(dropout_seed);

  Matrix x = embed(phoneme_ids, sup_ids, params.embeddings);
  if (!x.allFinite()) throw NumericalError("non-finite input embedding", -1);
  const Index T = x.rows();
  const auto H = static_cast<Index>(config.hidden);
  const auto d = static_cast<Index>(config.head_dim());
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));

  if (cache) {
    cache->phoneme_ids = phoneme_ids;
    cache->sup_ids = sup_ids;
    cache->layers.assign(params.layers.size(), {});
  }
  LayerCache scratch;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const LayerParams& L = params.layers[l];
    LayerCache& c = cache ? cache->layers[l] : scratch;
    c.input = x;
    c.q = (x * L.wq).rowwise() + L.bq.row(0);
    c.k = (x * L.wk).rowwise() + L.bk.row(0);
    c.v = (x * L.wv).rowwise() + L.bv.row(0);
    c.probs.assign(config.heads, {});
    c.attn_keep.assign(config.heads, {});
    c.context.resize(T, H);
    for (std::size_t h = 0; h < config.heads; ++h) {
      const Index off = static_cast<Index>(h) * d;
      Matrix s = (c.q.middleCols(off, d) * c.k.middleCols(off, d).transpose()) * scale;
      softmax_rows(s);
      c.probs[h] = s;
      if (dropout) {
        c.attn_keep[h] = dropout_scale(T, T, config.dropout, rng);
        s = s.cwiseProduct(c.attn_keep[h]);
      }
      c.context.middleCols(off, d).noalias() = s * c.v.middleCols(off, d);
    }
    Matrix attn_out = (c.context * L.wo).rowwise() + L.bo.row(0);
    layer_norm_forward(x + attn_out, L.ln1_gain, L.ln1_bias, c.ln1_xhat, c.ln1_inv_std, c.y);

    c.conv1_pre = conv_forward(c.y, L.conv1_w, L.conv1_b, static_cast<Index>(config.ff_kernel1));
    c.ff_hidden = c.conv1_pre.cwiseMax(0.0);
    if (dropout) {
      c.conv1_keep = dropout_scale(T, c.ff_hidden.cols(), config.dropout, rng);
      c.ff_hidden = c.ff_hidden.cwiseProduct(c.conv1_keep);
    } else {
      c.conv1_keep.resize(0, 0);
    }
    Matrix ff_out = conv_forward(c.ff_hidden, L.conv2_w, L.conv2_b, static_cast<Index>(config.ff_kernel2));
    if (dropout) {
      c.conv2_keep = dropout_scale(T, H, config.dropout, rng);
      ff_out = ff_out.cwiseProduct(c.conv2_keep);
    } else {
      c.conv2_keep.resize(0, 0);
    }
    layer_norm_forward(c.y + ff_out, L.ln2_gain, L.ln2_bias, c.ln2_xhat, c.ln2_inv_std, x);
    if (!x.allFinite()) {
      throw NumericalError("non-finite activation in layer " + std::to_string(l), static_cast<long>(l));
    }
  }
  if (cache) cache->hidden = x;
  return x;
}

// ---------------------------------------------------------------------------
// Heads

MlmOutput mlm_heads(const Matrix& hidden, const MaskedExample& ex, const EncoderParams& params) {
  MlmOutput out;
  for (std::size_t t = 0; t < ex.pos_masked.size(); ++t) {
    if (ex.pos_masked[t]) {
      out.phoneme_positions.push_back(t);
      out.phoneme_targets.push_back(ex.target_phoneme_ids[t]);
    }
  }
  for (std::size_t j = 0; j < ex.sup_masked.size(); ++j) {
    if (ex.sup_masked[j]) {
      out.sup_tokens.push_back(j);
      out.sup_targets.push_back(ex.target_sup_ids[j]);
    }
  }

  const Index H = hidden.cols();
  Matrix gathered(static_cast<Index>(out.phoneme_positions.size()), H);
  for (std::size_t r = 0; r < out.phoneme_positions.size(); ++r) {
    gathered.row(static_cast<Index>(r)) = hidden.row(static_cast<Index>(out.phoneme_positions[r]));
  }
  out.phoneme_logits = (gathered * params.phoneme_head_w).rowwise() + params.phoneme_head_b.row(0);

  Matrix pooled(static_cast<Index>(out.sup_tokens.size()), H);
  for (std::size_t r = 0; r < out.sup_tokens.size(); ++r) {
    const auto rows = pooled_positions(ex, out.sup_tokens[r]);
    RowVector acc = RowVector::Zero(H);
    for (auto t : rows) acc += hidden.row(static_cast<Index>(t));
    pooled.row(static_cast<Index>(r)) = acc / static_cast<double>(rows.size());
  }
  out.sup_logits = (pooled * params.sup_head_w).rowwise() + params.sup_head_b.row(0);

  Matrix probs;
  out.loss_phoneme = cross_entropy(out.phoneme_logits, out.phoneme_targets, probs, out.phoneme_correct);
  out.loss_sup = cross_entropy(out.sup_logits, out.sup_targets, probs, out.sup_correct);
  out.loss_total = out.loss_phoneme + out.loss_sup;
  return out;
}

// ---------------------------------------------------------------------------
// Backward

MlmOutput accumulate_gradients(const MaskedExample& ex, const EncoderParams& params,
                               const ModelConfig& config, EncoderParams& grad, double scale,
                               bool train_mode, std::uint64_t dropout_seed) {
  ForwardCache cache;
  encoder_forward(ex.input_phoneme_ids, ex.input_sup_ids_upsampled, params, config, train_mode,
                  dropout_seed, &cache);
  MlmOutput out = mlm_heads(cache.hidden, ex, params);
  if (!std::isfinite(out.loss_total)) throw NumericalError("non-finite MLM loss");

  const Matrix& hidden = cache.hidden;
  const Index T = hidden.rows();
  const Index H = hidden.cols();
  Matrix dhidden = Matrix::Zero(T, H);

  // Phoneme head.
  if (!out.phoneme_positions.empty()) {
    Matrix dlogits = out.phoneme_logits;
    softmax_rows(dlogits);
    for (std::size_t r = 0; r < out.phoneme_positions.size(); ++r) {
      dlogits(static_cast<Index>(r), out.phoneme_targets[r]) -= 1.0;
    }
    dlogits *= scale / static_cast<double>(out.phoneme_positions.size());
    Matrix gathered(dlogits.rows(), H);
    for (std::size_t r = 0; r < out.phoneme_positions.size(); ++r) {
      gathered.row(static_cast<Index>(r)) = hidden.row(static_cast<Index>(out.phoneme_positions[r]));
    }
    grad.phoneme_head_w.noalias() += gathered.transpose() * dlogits;
    grad.phoneme_head_b.row(0) += dlogits.colwise().sum();
    const Matrix dgathered = dlogits * params.phoneme_head_w.transpose();
    for (std::size_t r = 0; r < out.phoneme_positions.size(); ++r) {
      dhidden.row(static_cast<Index>(out.phoneme_positions[r])) += dgathered.row(static_cast<Index>(r));
    }
  }

  // Sup head through mean pooling.
  if (!out.sup_tokens.empty()) {
    Matrix dlogits = out.sup_logits;
    softmax_rows(dlogits);
    for (std::size_t r = 0; r < out.sup_tokens.size(); ++r) {
      dlogits(static_cast<Index>(r), out.sup_targets[r]) -= 1.0;
    }
    dlogits *= scale / static_cast<double>(out.sup_tokens.size());
    Matrix pooled(dlogits.rows(), H);
    std::vector<std::vector<std::size_t>> pools;
    for (std::size_t r = 0; r < out.sup_tokens.size(); ++r) {
      pools.push_back(pooled_positions(ex, out.sup_tokens[r]));
      RowVector acc = RowVector::Zero(H);
      for (auto t : pools.back()) acc += hidden.row(static_cast<Index>(t));
      pooled.row(static_cast<Index>(r)) = acc / static_cast<double>(pools.back().size());
    }
    grad.sup_head_w.noalias() += pooled.transpose() * dlogits;
    grad.sup_head_b.row(0) += dlogits.colwise().sum();
    const Matrix dpooled = dlogits * params.sup_head_w.transpose();
    for (std::size_t r = 0; r < pools.size(); ++r) {
      const double share = 1.0 / static_cast<double>(pools[r].size());
      for (auto t : pools[r]) dhidden.row(static_cast<Index>(t)) += share * dpooled.row(static_cast<Index>(r));
    }
  }

  if (out.phoneme_positions.empty() && out.sup_tokens.empty()) return out;

  const auto d = static_cast<Index>(config.head_dim());
  const double att_scale = 1.0 / std::sqrt(static_cast<double>(d));
  Matrix dx = std::move(dhidden);
  for (std::size_t li = params.layers.size(); li-- > 0;) {
    const LayerParams& L = params.layers[li];
    LayerParams& G = grad.layers[li];
    const LayerCache& c = cache.layers[li];

    // out = LN2(y + dropout(conv2(ff_hidden)))
    const Matrix dr2 = layer_norm_backward(dx, c.ln2_xhat, c.ln2_inv_std, L.ln2_gain, G.ln2_gain, G.ln2_bias);
    Matrix dff_out = c.conv2_keep.size() ? Matrix(dr2.cwiseProduct(c.conv2_keep)) : dr2;
    Matrix dff_hidden = conv_backward(dff_out, c.ff_hidden, L.conv2_w,
                                      static_cast<Index>(config.ff_kernel2), G.conv2_w, G.conv2_b);
    if (c.conv1_keep.size()) dff_hidden = dff_hidden.cwiseProduct(c.conv1_keep);
    const Matrix dconv1 = (c.conv1_pre.array() > 0.0).select(dff_hidden, 0.0);
    Matrix dy = dr2 + conv_backward(dconv1, c.y, L.conv1_w, static_cast<Index>(config.ff_kernel1),
                                    G.conv1_w, G.conv1_b);

    // y = LN1(x + attention(x))
    const Matrix dr1 = layer_norm_backward(dy, c.ln1_xhat, c.ln1_inv_std, L.ln1_gain, G.ln1_gain, G.ln1_bias);
    G.wo.noalias() += c.context.transpose() * dr1;
    G.bo.row(0) += dr1.colwise().sum();
    const Matrix dcontext = dr1 * L.wo.transpose();

    Matrix dq(T, H), dk(T, H), dv(T, H);
    for (std::size_t h = 0; h < config.heads; ++h) {
      const Index off = static_cast<Index>(h) * d;
      const Matrix& P = c.probs[h];
      const Matrix Pd = c.attn_keep[h].size() ? Matrix(P.cwiseProduct(c.attn_keep[h])) : P;
      const auto dctx_h = dcontext.middleCols(off, d);
      dv.middleCols(off, d).noalias() = Pd.transpose() * dctx_h;
      Matrix dP = dctx_h * c.v.middleCols(off, d).transpose();
      if (c.attn_keep[h].size()) dP = dP.cwiseProduct(c.attn_keep[h]);
      const Eigen::VectorXd row_dot = dP.cwiseProduct(P).rowwise().sum();
      const Matrix dS = (P.array() * (dP.colwise() - row_dot).array()).matrix() * att_scale;
      dq.middleCols(off, d).noalias() = dS * c.k.middleCols(off, d);
      dk.middleCols(off, d).noalias() = dS.transpose() * c.q.middleCols(off, d);
    }
    G.wq.noalias() += c.input.transpose() * dq;
    G.wk.noalias() += c.input.transpose() * dk;
    G.wv.noalias() += c.input.transpose() * dv;
    G.bq.row(0) += dq.colwise().sum();
    G.bk.row(0) += dk.colwise().sum();
    G.bv.row(0) += dv.colwise().sum();
    dx = dr1;
    dx.noalias() += dq * L.wq.transpose();
    dx.noalias() += dk * L.wk.transpose();
    dx.noalias() += dv * L.wv.transpose();
  }

  for (Index t = 0; t < T; ++t) {
    grad.embeddings.phoneme.row(cache.phoneme_ids[static_cast<std::size_t>(t)]) += dx.row(t);
    grad.embeddings.sup.row(cache.sup_ids[static_cast<std::size_t>(t)]) += dx.row(t);
    grad.embeddings.position.row(t) += dx.row(t);
  }
  return out;
}

LossAndGradient backward(const MaskedExample& ex, const EncoderParams& params,
                         const ModelConfig& config, bool train_mode, std::uint64_t dropout_seed) {
  LossAndGradient result{{}, zero_params(config)};
  result.output = accumulate_gradients(ex, params, config, result.gradient, 1.0, train_mode, dropout_seed);
  return result;
}

double mlm_loss(const MaskedExample& ex, const EncoderParams& params, const ModelConfig& config) {
  const Matrix hidden = encoder_forward(ex, params, config, false);
  return mlm_heads(hidden, ex, params).loss_total;
}

}  // namespace mpbert
