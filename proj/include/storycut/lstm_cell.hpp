#pragma once

#include <span>
#include <vector>

#include "storycut/tensor.hpp"

namespace storycut {

// Gate pre-activations are laid out as [z_i | z_g | z_c | z_o], H each.
// Gates: input b_i = sig(z_i), forget b_g = sig(z_g + w_g.c_prev),
// candidate u = tanh(z_c), cell c = b_g.c_prev + b_i.u,
// output b_o = sig(z_o + w_o.c), h = tanh(c).b_o.
// Peepholes w_g, w_o are diagonal; the output gate reads the current cell.

struct LstmState {
  std::vector<double> h;
  std::vector<double> c;

  explicit LstmState(index_t hidden = 0)
      : h(static_cast<std::size_t>(hidden), 0.0), c(static_cast<std::size_t>(hidden), 0.0) {}
};

struct CellStepCache {
  std::vector<double> h_prev, c_prev;
  std::vector<double> bi, bg, u, bo, q, c;

  void resize(index_t hidden) {
    const auto n = static_cast<std::size_t>(hidden);
    h_prev.resize(n);
    c_prev.resize(n);
    bi.resize(n);
    bg.resize(n);
    u.resize(n);
    bo.resize(n);
    q.resize(n);
    c.resize(n);
  }
};

// Recurrent core: everything behind the hidden block f (= W_f . input).
struct CellCore {
  const Tensor2* W_h;  // 4H x H
  const Tensor2* b;    // 4H x 1
  const Tensor2* w_g;  // H x 1, forget-gate peephole
  const Tensor2* w_o;  // H x 1, output-gate peephole

  index_t hidden() const { return w_g->rows; }
};

struct CellCoreGrads {
  Tensor2* W_h;
  Tensor2* b;
  Tensor2* w_g;
  Tensor2* w_o;
};

// One step: consumes the hidden block f (4H), previous state from cache
// (h_prev, c_prev must be filled by the caller), writes h_out/c_out and the
// remaining cache fields.
void cell_core_forward(const CellCore& p, const double* f, CellStepCache& cache,
                       double* h_out, double* c_out);

// Reverse step. dh_total is the complete gradient on h at this step; dc_in
// the carry from the following step. Writes the gate-preactivation gradient
// dz (4H) and fresh carries dh_prev (H) and dc_prev (H); accumulates into
// the core parameter grads.
void cell_core_backward(const CellCore& p, CellCoreGrads& g, const CellStepCache& cache,
                        const double* dh_total, const double* dc_in, double* dz_out,
                        double* dh_prev_out, double* dc_prev_out);

// Full cell including the input projection W_f (4H x D); the form used by
// the per-frame window scorer and by tests.
struct LstmCell {
  const Tensor2* W_f;
  CellCore core;

  index_t input_dim() const { return W_f->cols; }
  index_t hidden() const { return core.hidden(); }
};

LstmState lstm_cell_forward(const LstmCell& cell, std::span<const double> x,
                            const LstmState& prev, CellStepCache* cache = nullptr);

}  // namespace storycut
