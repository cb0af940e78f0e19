#include "storycut/recurrent_stack.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace storycut {

void StackConfig::validate() const {
  if (input_dim <= 0) throw std::invalid_argument("stack: input_dim must be positive");
  if (hidden.empty()) throw std::invalid_argument("stack: need at least one layer");
  for (index_t h : hidden)
    if (h <= 0) throw std::invalid_argument("stack: hidden widths must be positive");
}

namespace {

std::string layer_name(const std::string& prefix, index_t k, const char* leaf) {
  return prefix + "l" + std::to_string(k) + "." + leaf;
}

struct LayerView {
  const Tensor2* W_f;
  CellCore core;
};

LayerView layer_view(const ParamStore& store, const std::string& prefix, index_t k) {
  LayerView v;
  v.W_f = &store.value(layer_name(prefix, k, "W_f"));
  v.core.W_h = &store.value(layer_name(prefix, k, "W_h"));
  v.core.b = &store.value(layer_name(prefix, k, "b"));
  v.core.w_g = &store.value(layer_name(prefix, k, "w_g"));
  v.core.w_o = &store.value(layer_name(prefix, k, "w_o"));
  return v;
}

CellCoreGrads layer_grads(ParamStore& store, const std::string& prefix, index_t k) {
  CellCoreGrads g;
  g.W_h = &store.grad(layer_name(prefix, k, "W_h"));
  g.b = &store.grad(layer_name(prefix, k, "b"));
  g.w_g = &store.grad(layer_name(prefix, k, "w_g"));
  g.w_o = &store.grad(layer_name(prefix, k, "w_o"));
  return g;
}

void init_uniform(Tensor2& t, double scale, Rng& rng) {
  for (double& v : t.data) v = rng.uniform(-scale, scale);
}

}  // namespace

void stack_create_params(const StackConfig& cfg, ParamStore& store, const std::string& prefix) {
  cfg.validate();
  for (index_t k = 0; k < cfg.layers(); ++k) {
    const index_t H = cfg.hidden[static_cast<std::size_t>(k)];
    const index_t D = cfg.layer_input_dim(k);
    store.create(layer_name(prefix, k, "W_f"), 4 * H, D);
    store.create(layer_name(prefix, k, "W_h"), 4 * H, H);
    store.create(layer_name(prefix, k, "b"), 4 * H, 1);
    store.create(layer_name(prefix, k, "w_g"), H, 1);
    store.create(layer_name(prefix, k, "w_o"), H, 1);
  }
}

void stack_init_params(const StackConfig& cfg, ParamStore& store, const std::string& prefix,
                       Rng& rng) {
  for (index_t k = 0; k < cfg.layers(); ++k) {
    const index_t H = cfg.hidden[static_cast<std::size_t>(k)];
    const index_t D = cfg.layer_input_dim(k);
    init_uniform(store.value(layer_name(prefix, k, "W_f")), 1.0 / std::sqrt(double(D)), rng);
    init_uniform(store.value(layer_name(prefix, k, "W_h")), 1.0 / std::sqrt(double(H)), rng);
    Tensor2& b = store.value(layer_name(prefix, k, "b"));
    b.zero();
    for (index_t j = H; j < 2 * H; ++j) b.data[static_cast<std::size_t>(j)] = 1.0;
    init_uniform(store.value(layer_name(prefix, k, "w_g")), 1.0 / std::sqrt(double(H)), rng);
    init_uniform(store.value(layer_name(prefix, k, "w_o")), 1.0 / std::sqrt(double(H)), rng);
  }
}

void stack_forward(const StackConfig& cfg, const ParamStore& store, const std::string& prefix,
                   const Tensor2& features, Tensor2& top_h, Tensor2* top_f, StackCache* cache) {
  cfg.validate();
  if (features.cols != cfg.input_dim)
    throw std::invalid_argument("stack_forward: feature width mismatch");
  if (features.rows <= 0) throw std::invalid_argument("stack_forward: empty sequence");
  const index_t T = features.rows;
  const index_t K = cfg.layers();
  const index_t Htop = cfg.top_hidden();

  top_h = Tensor2(T, Htop);
  if (top_f) *top_f = Tensor2(T, 4 * Htop);

  std::vector<LayerView> views;
  views.reserve(static_cast<std::size_t>(K));
  for (index_t k = 0; k < K; ++k) views.push_back(layer_view(store, prefix, k));

  if (cache) {
    cache->T = T;
    cache->inputs.assign(static_cast<std::size_t>(K), {});
    cache->steps.assign(static_cast<std::size_t>(K), {});
    for (index_t k = 0; k < K; ++k) {
      cache->inputs[static_cast<std::size_t>(k)].resize(
          static_cast<std::size_t>(T * cfg.layer_input_dim(k)));
      cache->steps[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(T));
    }
  }

  std::vector<LstmState> state;
  for (index_t k = 0; k < K; ++k) state.emplace_back(cfg.hidden[static_cast<std::size_t>(k)]);

  std::vector<double> input, f;
  for (index_t t = 0; t < T; ++t) {
    for (index_t k = 0; k < K; ++k) {
      const index_t H = cfg.hidden[static_cast<std::size_t>(k)];
      const index_t Din = cfg.layer_input_dim(k);
      if (k == 0) {
        input.assign(features.row(t), features.row(t) + cfg.input_dim);
      }
      // `input` now holds this layer's input (k>0 case is built below after f).
      std::vector<double> f_here(static_cast<std::size_t>(4 * H), 0.0);
      matvec_add(*views[static_cast<std::size_t>(k)].W_f, input.data(), f_here.data());

      CellStepCache local;
      CellStepCache& cc =
          cache ? cache->steps[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)] : local;
      cc.resize(H);
      cc.h_prev = state[static_cast<std::size_t>(k)].h;
      cc.c_prev = state[static_cast<std::size_t>(k)].c;
      if (cache)
        std::copy(input.begin(), input.end(),
                  cache->inputs[static_cast<std::size_t>(k)].begin() +
                      static_cast<std::ptrdiff_t>(t * Din));

      cell_core_forward(views[static_cast<std::size_t>(k)].core, f_here.data(), cc,
                        state[static_cast<std::size_t>(k)].h.data(),
                        state[static_cast<std::size_t>(k)].c.data());

      if (k == K - 1) {
        std::copy(state[static_cast<std::size_t>(k)].h.begin(),
                  state[static_cast<std::size_t>(k)].h.end(), top_h.row(t));
        if (top_f) std::copy(f_here.begin(), f_here.end(), top_f->row(t));
      } else {
        // Build the next layer's input from this layer's outputs.
        const auto& h = state[static_cast<std::size_t>(k)].h;
        input.assign(h.begin(), h.end());
        if (cfg.fast_forward) input.insert(input.end(), f_here.begin(), f_here.end());
      }
    }
  }
}

void stack_backward(const StackConfig& cfg, ParamStore& store, const std::string& prefix,
                    const StackCache& cache, const Tensor2& d_top_h, Tensor2* d_features) {
  cfg.validate();
  const index_t T = cache.T;
  const index_t K = cfg.layers();
  if (d_top_h.rows != T || d_top_h.cols != cfg.top_hidden())
    throw std::invalid_argument("stack_backward: d_top_h shape mismatch");

  std::vector<LayerView> views;
  std::vector<CellCoreGrads> grads;
  std::vector<Tensor2*> dWf;
  for (index_t k = 0; k < K; ++k) {
    views.push_back(layer_view(store, prefix, k));
    grads.push_back(layer_grads(store, prefix, k));
    dWf.push_back(&store.grad(layer_name(prefix, k, "W_f")));
  }

  if (d_features) *d_features = Tensor2(T, cfg.input_dim);

  // Per-layer carries across time, and per-step consumer contributions from
  // the layer above (written at the same t, since k runs downward).
  std::vector<std::vector<double>> carry_h, carry_c, cons_h, cons_f;
  for (index_t k = 0; k < K; ++k) {
    const auto H = static_cast<std::size_t>(cfg.hidden[static_cast<std::size_t>(k)]);
    carry_h.emplace_back(H, 0.0);
    carry_c.emplace_back(H, 0.0);
    cons_h.emplace_back(H, 0.0);
    cons_f.emplace_back(4 * H, 0.0);
  }

  std::vector<double> dh_total, dz, dinput;
  for (index_t t = T - 1; t >= 0; --t) {
    for (index_t k = K - 1; k >= 0; --k) {
      const auto ku = static_cast<std::size_t>(k);
      const index_t H = cfg.hidden[ku];
      const index_t Din = cfg.layer_input_dim(k);
      const CellStepCache& cc = cache.steps[ku][static_cast<std::size_t>(t)];

      dh_total.assign(carry_h[ku].begin(), carry_h[ku].end());
      if (k == K - 1) {
        const double* row = d_top_h.row(t);
        for (index_t j = 0; j < H; ++j) dh_total[static_cast<std::size_t>(j)] += row[j];
      } else {
        for (index_t j = 0; j < H; ++j)
          dh_total[static_cast<std::size_t>(j)] += cons_h[ku][static_cast<std::size_t>(j)];
      }

      dz.assign(static_cast<std::size_t>(4 * H), 0.0);
      std::vector<double> dc_prev(static_cast<std::size_t>(H));
      cell_core_backward(views[ku].core, grads[ku], cc, dh_total.data(), carry_c[ku].data(),
                         dz.data(), carry_h[ku].data(), dc_prev.data());
      carry_c[ku] = dc_prev;

      // Total gradient on the hidden block f: the cell's own dz plus, in
      // fast-forward mode, what the layer above read from f directly.
      if (k < K - 1 && cfg.fast_forward)
        for (index_t r = 0; r < 4 * H; ++r)
          dz[static_cast<std::size_t>(r)] += cons_f[ku][static_cast<std::size_t>(r)];

      const double* in_row = cache.inputs[ku].data() + static_cast<std::ptrdiff_t>(t * Din);
      outer_add(*dWf[ku], dz.data(), in_row);

      dinput.assign(static_cast<std::size_t>(Din), 0.0);
      matvec_t_add(*views[ku].W_f, dz.data(), dinput.data());

      if (k == 0) {
        if (d_features) {
          double* out = d_features->row(t);
          for (index_t j = 0; j < Din; ++j) out[j] = dinput[static_cast<std::size_t>(j)];
        }
      } else {
        const auto pu = static_cast<std::size_t>(k - 1);
        const index_t Hp = cfg.hidden[pu];
        for (index_t j = 0; j < Hp; ++j)
          cons_h[pu][static_cast<std::size_t>(j)] = dinput[static_cast<std::size_t>(j)];
        if (cfg.fast_forward)
          for (index_t r = 0; r < 4 * Hp; ++r)
            cons_f[pu][static_cast<std::size_t>(r)] = dinput[static_cast<std::size_t>(Hp + r)];
      }
    }
  }
}

}  // namespace storycut
