#include "storycut/proposal_head.hpp"

#include <cmath>
#include <stdexcept>

namespace storycut {

void HeadConfig::validate() const {
  if (feature_dim <= 0) throw std::invalid_argument("head: feature_dim must be positive");
  if (hidden <= 0) throw std::invalid_argument("head: hidden must be positive");
  if (num_layers <= 0) throw std::invalid_argument("head: num_layers must be positive");
}

StackConfig HeadConfig::stack() const {
  StackConfig s;
  s.input_dim = feature_dim;
  s.hidden.assign(static_cast<std::size_t>(num_layers), hidden);
  s.fast_forward = fast_forward;
  return s;
}

HeadModel::HeadModel(HeadConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  stack_create_params(cfg_.stack(), store_, "stack.");
  const index_t H = cfg_.hidden;
  store_.create("cls.w", 1, H);
  store_.create("cls.b", 1, 1);
  store_.create("reg.W", 2, H);
  store_.create("reg.b", 2, 1);
}

void HeadModel::init_params(Rng& rng) {
  stack_init_params(cfg_.stack(), store_, "stack.", rng);
  const double sh = 1.0 / std::sqrt(double(cfg_.hidden));
  for (double& v : store_.value("cls.w").data) v = rng.uniform(-sh, sh);
  store_.value("cls.b").zero();
  for (double& v : store_.value("reg.W").data) v = rng.uniform(-sh, sh);
  store_.value("reg.b").zero();
}

HeadOutput HeadModel::forward(const Tensor2& features, HeadCache* cache) const {
  if (features.rows < 1) throw std::invalid_argument("head: need at least one frame");
  const index_t H = cfg_.hidden;
  const index_t T = features.rows;

  Tensor2 top_h;
  stack_forward(cfg_.stack(), store_, "stack.", features, top_h, nullptr,
                cache ? &cache->stack : nullptr);

  std::vector<double> pooled(static_cast<std::size_t>(H));
  std::vector<index_t> argmax(static_cast<std::size_t>(H), 0);
  for (index_t j = 0; j < H; ++j) {
    double best = top_h.at(0, j);
    index_t best_t = 0;
    for (index_t t = 1; t < T; ++t) {
      if (top_h.at(t, j) > best) {  // strict: ties keep the earliest step
        best = top_h.at(t, j);
        best_t = t;
      }
    }
    pooled[static_cast<std::size_t>(j)] = best;
    argmax[static_cast<std::size_t>(j)] = best_t;
  }

  const Tensor2& cw = store_.value("cls.w");
  const Tensor2& cb = store_.value("cls.b");
  const Tensor2& rW = store_.value("reg.W");
  const Tensor2& rb = store_.value("reg.b");

  HeadOutput out;
  out.story_logit = cb.data[0];
  for (index_t j = 0; j < H; ++j)
    out.story_logit += cw.data[static_cast<std::size_t>(j)] * pooled[static_cast<std::size_t>(j)];
  out.p_story = sigmoid(out.story_logit);
  double reg[2] = {rb.data[0], rb.data[1]};
  matvec_add(rW, pooled.data(), reg);
  out.offsets.start = reg[0];
  out.offsets.end = reg[1];

  if (cache) {
    cache->pooled = std::move(pooled);
    cache->argmax_t = std::move(argmax);
  }
  return out;
}

void HeadModel::backward(const HeadCache& cache, double dlogit, const BoundaryOffsets& doffsets) {
  const index_t H = cfg_.hidden;
  const index_t T = cache.stack.T;

  const Tensor2& cw = store_.value("cls.w");
  const Tensor2& rW = store_.value("reg.W");
  Tensor2& dcw = store_.grad("cls.w");
  Tensor2& dcb = store_.grad("cls.b");
  Tensor2& drW = store_.grad("reg.W");
  Tensor2& drb = store_.grad("reg.b");

  dcb.data[0] += dlogit;
  drb.data[0] += doffsets.start;
  drb.data[1] += doffsets.end;

  std::vector<double> dpooled(static_cast<std::size_t>(H));
  for (index_t j = 0; j < H; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    dcw.data[ju] += dlogit * cache.pooled[ju];
    drW.data[ju] += doffsets.start * cache.pooled[ju];
    drW.data[static_cast<std::size_t>(H + j)] += doffsets.end * cache.pooled[ju];
    dpooled[ju] = dlogit * cw.data[ju] + doffsets.start * rW.data[ju] +
                  doffsets.end * rW.data[static_cast<std::size_t>(H + j)];
  }

  // Max-pool routes each dim's gradient to the step that won.
  Tensor2 d_top_h(T, H);
  for (index_t j = 0; j < H; ++j)
    d_top_h.at(cache.argmax_t[static_cast<std::size_t>(j)], j) = dpooled[static_cast<std::size_t>(j)];

  stack_backward(cfg_.stack(), store_, "stack.", cache.stack, d_top_h);
}

}  // namespace storycut
