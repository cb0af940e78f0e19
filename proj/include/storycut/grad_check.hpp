#pragma once

#include <cstdint>
#include <functional>

#include "storycut/param_store.hpp"

namespace storycut {

// loss_fn must return the scalar loss and accumulate analytic gradients into
// store.grad (the harness zeroes grads before the analytic pass).
//
// Returns the max over sampled coordinates of
//   |analytic - central_difference| / max(1e-5, |analytic| + |central_difference|)
// with central difference (f(w+eps) - f(w-eps)) / (2 eps). The denominator
// floor sits above the finite-difference noise floor so that correct
// near-zero gradients are not misreported as relative-error failures.
double grad_check(const std::function<double(ParamStore&)>& loss_fn, ParamStore& store,
                  double eps, std::size_t max_coords_per_tensor = 64,
                  std::uint64_t coord_seed = 0x5eedc0de);

}  // namespace storycut
