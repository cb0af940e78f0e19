#include "storycut/ban.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace storycut {

void BanConfig::validate() const {
  if (feature_dim <= 0) throw std::invalid_argument("ban: feature_dim must be positive");
  if (hidden <= 0) throw std::invalid_argument("ban: hidden must be positive");
}

std::array<double, kNumFrameCategories> softmax4(
    const std::array<double, kNumFrameCategories>& logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  std::array<double, kNumFrameCategories> p{};
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(logits[i] - m);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

Tensor2 ban_window(const Tensor2& features, index_t center) {
  if (features.rows < 1) throw std::invalid_argument("ban_window: empty sequence");
  if (center < 0 || center >= features.rows)
    throw std::invalid_argument("ban_window: center out of range");
  Tensor2 w(kBanWindow, features.cols);
  for (index_t k = 0; k < kBanWindow; ++k) {
    const index_t src = std::clamp<index_t>(center - kBanWindow / 2 + k, 0, features.rows - 1);
    std::copy(features.row(src), features.row(src) + features.cols, w.row(k));
  }
  return w;
}

BanModel::BanModel(BanConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  const index_t H = cfg_.hidden;
  const index_t D = cfg_.feature_dim;
  store_.create("lstm.W_f", 4 * H, D);
  store_.create("lstm.W_h", 4 * H, H);
  store_.create("lstm.b", 4 * H, 1);
  store_.create("lstm.w_g", H, 1);
  store_.create("lstm.w_o", H, 1);
  store_.create("out.W", kNumFrameCategories, H);
  store_.create("out.b", kNumFrameCategories, 1);
}

void BanModel::init_params(Rng& rng) {
  const index_t H = cfg_.hidden;
  const double sx = 1.0 / std::sqrt(double(cfg_.feature_dim));
  const double sh = 1.0 / std::sqrt(double(H));
  for (double& v : store_.value("lstm.W_f").data) v = rng.uniform(-sx, sx);
  for (double& v : store_.value("lstm.W_h").data) v = rng.uniform(-sh, sh);
  Tensor2& b = store_.value("lstm.b");
  b.zero();
  for (index_t j = H; j < 2 * H; ++j) b.data[static_cast<std::size_t>(j)] = 1.0;
  for (double& v : store_.value("lstm.w_g").data) v = rng.uniform(-sh, sh);
  for (double& v : store_.value("lstm.w_o").data) v = rng.uniform(-sh, sh);
  for (double& v : store_.value("out.W").data) v = rng.uniform(-sh, sh);
  store_.value("out.b").zero();
}

std::array<double, kNumFrameCategories> BanModel::window_logits(const Tensor2& window,
                                                                BanCache* cache) const {
  if (window.rows != kBanWindow || window.cols != cfg_.feature_dim)
    throw std::invalid_argument("ban: window must be 7 x feature_dim");
  const index_t H = cfg_.hidden;

  LstmCell cell;
  cell.W_f = &store_.value("lstm.W_f");
  cell.core.W_h = &store_.value("lstm.W_h");
  cell.core.b = &store_.value("lstm.b");
  cell.core.w_g = &store_.value("lstm.w_g");
  cell.core.w_o = &store_.value("lstm.w_o");

  std::vector<CellStepCache> local_steps;
  std::vector<CellStepCache>& steps = cache ? cache->steps : local_steps;
  steps.assign(static_cast<std::size_t>(kBanWindow), {});
  if (cache)
    cache->inputs.assign(window.data.begin(), window.data.end());

  std::vector<double> hbar(static_cast<std::size_t>(H), 0.0);
  LstmState state(H);
  std::vector<double> f(static_cast<std::size_t>(4 * H));
  for (index_t t = 0; t < kBanWindow; ++t) {
    std::fill(f.begin(), f.end(), 0.0);
    matvec_add(*cell.W_f, window.row(t), f.data());
    CellStepCache& cc = steps[static_cast<std::size_t>(t)];
    cc.resize(H);
    cc.h_prev = state.h;
    cc.c_prev = state.c;
    cell_core_forward(cell.core, f.data(), cc, state.h.data(), state.c.data());
    for (index_t j = 0; j < H; ++j) hbar[static_cast<std::size_t>(j)] += state.h[static_cast<std::size_t>(j)];
  }
  for (double& v : hbar) v /= double(kBanWindow);

  const Tensor2& W = store_.value("out.W");
  const Tensor2& b = store_.value("out.b");
  std::array<double, kNumFrameCategories> logits{};
  for (index_t r = 0; r < kNumFrameCategories; ++r) logits[static_cast<std::size_t>(r)] = b.data[static_cast<std::size_t>(r)];
  matvec_add(W, hbar.data(), logits.data());

  if (cache) {
    cache->hbar = hbar;
    cache->logits = logits;
  }
  return logits;
}

std::array<double, kNumFrameCategories> BanModel::window_probs(const Tensor2& window) const {
  return softmax4(window_logits(window));
}

void BanModel::window_backward(const BanCache& cache,
                               const std::array<double, kNumFrameCategories>& dlogits) {
  const index_t H = cfg_.hidden;
  const index_t D = cfg_.feature_dim;

  Tensor2& dW = store_.grad("out.W");
  Tensor2& db = store_.grad("out.b");
  outer_add(dW, dlogits.data(), cache.hbar.data());
  for (index_t r = 0; r < kNumFrameCategories; ++r) db.data[static_cast<std::size_t>(r)] += dlogits[static_cast<std::size_t>(r)];

  std::vector<double> dhbar(static_cast<std::size_t>(H), 0.0);
  matvec_t_add(store_.value("out.W"), dlogits.data(), dhbar.data());
  for (double& v : dhbar) v /= double(kBanWindow);

  CellCore core;
  core.W_h = &store_.value("lstm.W_h");
  core.b = &store_.value("lstm.b");
  core.w_g = &store_.value("lstm.w_g");
  core.w_o = &store_.value("lstm.w_o");
  CellCoreGrads grads;
  grads.W_h = &store_.grad("lstm.W_h");
  grads.b = &store_.grad("lstm.b");
  grads.w_g = &store_.grad("lstm.w_g");
  grads.w_o = &store_.grad("lstm.w_o");
  Tensor2& dWf = store_.grad("lstm.W_f");
  const Tensor2& Wf = store_.value("lstm.W_f");

  std::vector<double> carry_h(static_cast<std::size_t>(H), 0.0);
  std::vector<double> carry_c(static_cast<std::size_t>(H), 0.0);
  std::vector<double> dh_total(static_cast<std::size_t>(H));
  std::vector<double> dz(static_cast<std::size_t>(4 * H));
  std::vector<double> dc_prev(static_cast<std::size_t>(H));
  for (index_t t = kBanWindow - 1; t >= 0; --t) {
    for (index_t j = 0; j < H; ++j)
      dh_total[static_cast<std::size_t>(j)] = dhbar[static_cast<std::size_t>(j)] + carry_h[static_cast<std::size_t>(j)];
    std::fill(dz.begin(), dz.end(), 0.0);
    cell_core_backward(core, grads, cache.steps[static_cast<std::size_t>(t)], dh_total.data(),
                       carry_c.data(), dz.data(), carry_h.data(), dc_prev.data());
    carry_c = dc_prev;
    outer_add(dWf, dz.data(), cache.inputs.data() + static_cast<std::ptrdiff_t>(t * D));
    (void)Wf;  // input gradients are not needed; features are data
  }
}

}  // namespace storycut
