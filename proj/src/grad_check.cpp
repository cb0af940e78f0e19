#include "storycut/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "storycut/errors.hpp"
#include "storycut/rng.hpp"

namespace storycut {

double grad_check(const std::function<double(ParamStore&)>& loss_fn, ParamStore& store,
                  double eps, std::size_t max_coords_per_tensor, std::uint64_t coord_seed) {
  store.zero_grads();
  const double base = loss_fn(store);
  if (!std::isfinite(base)) throw divergence_error("grad_check: loss is not finite");

  // snapshot the analytic gradient before finite-difference passes dirty it
  std::vector<std::vector<double>> analytic;
  analytic.reserve(store.entries().size());
  for (const auto& e : store.entries()) analytic.push_back(e.grad.data);

  const auto eval = [&](void) {
    const double l = loss_fn(store);
    if (!std::isfinite(l)) throw divergence_error("grad_check: perturbed loss is not finite");
    return l;
  };

  double worst = 0.0;
  for (std::size_t ei = 0; ei < store.entries().size(); ++ei) {
    auto& e = store.entries()[ei];
    const std::size_t n = e.value.data.size();
    std::vector<std::size_t> coords;
    if (n <= max_coords_per_tensor) {
      coords.resize(n);
      for (std::size_t i = 0; i < n; ++i) coords[i] = i;
    } else {
      Rng rng(mix_seed(coord_seed, ei));
      coords.reserve(max_coords_per_tensor);
      for (std::size_t i = 0; i < max_coords_per_tensor; ++i)
        coords.push_back(static_cast<std::size_t>(rng.uniform_index(n)));
      std::sort(coords.begin(), coords.end());
      coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    }
    for (std::size_t c : coords) {
      double& w = e.value.data[c];
      const double saved = w;
      w = saved + eps;
      const double lp = eval();
      w = saved - eps;
      const double lm = eval();
      w = saved;
      const double fd = (lp - lm) / (2.0 * eps);
      const double an = analytic[ei][c];
      // The denominator floor keeps near-zero gradients from being judged at
      // the central-difference noise floor (~|loss| * ulp / eps, about 1e-10
      // at eps 1e-5): a coordinate only fails if the absolute gap also
      // exceeds tolerance * 1e-5.
      const double rel = std::fabs(an - fd) / std::max(1e-5, std::fabs(an) + std::fabs(fd));
      worst = std::max(worst, rel);
    }
  }
  store.zero_grads();
  return worst;
}

}  // namespace storycut
