#include "storycut/lstm_cell.hpp"

#include <cmath>
#include <stdexcept>

namespace storycut {

void cell_core_forward(const CellCore& p, const double* f, CellStepCache& cache,
                       double* h_out, double* c_out) {
  const index_t H = p.hidden();
  if (p.W_h->rows != 4 * H || p.W_h->cols != H || p.b->rows != 4 * H || p.w_o->rows != H)
    throw std::invalid_argument("cell_core_forward: parameter shapes disagree");

  std::vector<double> z(static_cast<std::size_t>(4 * H));
  for (index_t r = 0; r < 4 * H; ++r) z[static_cast<std::size_t>(r)] = f[r] + p.b->data[static_cast<std::size_t>(r)];
  matvec_add(*p.W_h, cache.h_prev.data(), z.data());

  const double* wg = p.w_g->data.data();
  const double* wo = p.w_o->data.data();
  for (index_t j = 0; j < H; ++j) {
    const auto i = static_cast<std::size_t>(j);
    const double cp = cache.c_prev[i];
    const double bi = sigmoid(z[i]);
    const double bg = sigmoid(z[static_cast<std::size_t>(H + j)] + wg[i] * cp);
    const double u = std::tanh(z[static_cast<std::size_t>(2 * H + j)]);
    const double c = bg * cp + bi * u;
    const double bo = sigmoid(z[static_cast<std::size_t>(3 * H + j)] + wo[i] * c);
    const double q = std::tanh(c);
    cache.bi[i] = bi;
    cache.bg[i] = bg;
    cache.u[i] = u;
    cache.bo[i] = bo;
    cache.q[i] = q;
    cache.c[i] = c;
    c_out[j] = c;
    h_out[j] = q * bo;
  }
}

void cell_core_backward(const CellCore& p, CellCoreGrads& g, const CellStepCache& cache,
                        const double* dh_total, const double* dc_in, double* dz_out,
                        double* dh_prev_out, double* dc_prev_out) {
  const index_t H = p.hidden();
  const double* wg = p.w_g->data.data();
  const double* wo = p.w_o->data.data();

  for (index_t j = 0; j < H; ++j) {
    const auto i = static_cast<std::size_t>(j);
    const double bi = cache.bi[i], bg = cache.bg[i], u = cache.u[i];
    const double bo = cache.bo[i], q = cache.q[i];
    const double cp = cache.c_prev[i], c = cache.c[i];

    const double dbo = dh_total[j] * q;
    const double dq = dh_total[j] * bo;
    double dc = dq * dtanh_from_value(q) + dc_in[j];
    const double dao = dbo * dsigmoid_from_value(bo);
    dc += dao * wo[i];
    g.w_o->data[i] += dao * c;

    const double dbi = dc * u;
    const double du = dc * bi;
    const double dbg = dc * cp;
    double dcp = dc * bg;

    const double dai = dbi * dsigmoid_from_value(bi);
    const double dag = dbg * dsigmoid_from_value(bg);
    g.w_g->data[i] += dag * cp;
    dcp += dag * wg[i];

    dz_out[j] = dai;
    dz_out[H + j] = dag;
    dz_out[2 * H + j] = du * dtanh_from_value(u);
    dz_out[3 * H + j] = dao;
    dc_prev_out[j] = dcp;
  }

  for (index_t r = 0; r < 4 * H; ++r) g.b->data[static_cast<std::size_t>(r)] += dz_out[r];
  outer_add(*g.W_h, dz_out, cache.h_prev.data());
  for (index_t j = 0; j < H; ++j) dh_prev_out[j] = 0.0;
  matvec_t_add(*p.W_h, dz_out, dh_prev_out);
}

LstmState lstm_cell_forward(const LstmCell& cell, std::span<const double> x,
                            const LstmState& prev, CellStepCache* cache) {
  const index_t H = cell.hidden();
  const index_t D = cell.input_dim();
  if (std::cmp_not_equal(x.size(), D)) throw std::invalid_argument("lstm_cell_forward: input width mismatch");
  if (std::cmp_not_equal(prev.h.size(), H) || std::cmp_not_equal(prev.c.size(), H))
    throw std::invalid_argument("lstm_cell_forward: state width mismatch");

  std::vector<double> f(static_cast<std::size_t>(4 * H), 0.0);
  matvec_add(*cell.W_f, x.data(), f.data());

  CellStepCache local;
  CellStepCache& cc = cache ? *cache : local;
  cc.resize(H);
  cc.h_prev = prev.h;
  cc.c_prev = prev.c;

  LstmState next(H);
  cell_core_forward(cell.core, f.data(), cc, next.h.data(), next.c.data());
  return next;
}

}  // namespace storycut
