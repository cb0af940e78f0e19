#include <doctest.h>

#include <cmath>
#include <vector>

#include "storycut/errors.hpp"
#include "storycut/grad_check.hpp"
#include "storycut/param_store.hpp"
#include "storycut/rng.hpp"
#include "storycut/sampling.hpp"
#include "storycut/tensor.hpp"

using namespace storycut;

TEST_CASE("sigmoid basic identities") {
  CHECK(sigmoid(0.0) == doctest::Approx(0.5));
  CHECK(sigmoid(2.0) + sigmoid(-2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sigmoid(1000.0) == doctest::Approx(1.0));
  CHECK(sigmoid(-1000.0) == doctest::Approx(0.0));
  CHECK(std::isfinite(sigmoid(1e308)));
  CHECK(std::isfinite(sigmoid(-1e308)));
  const double s = sigmoid(0.7);
  CHECK(dsigmoid_from_value(s) == doctest::Approx(s * (1.0 - s)));
  const double t = std::tanh(0.7);
  CHECK(dtanh_from_value(t) == doctest::Approx(1.0 - t * t));
}

TEST_CASE("matvec and outer product kernels match naive loops") {
  Rng rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const index_t rows = 1 + index_t(rng.uniform_index(9));
    const index_t cols = 1 + index_t(rng.uniform_index(9));
    Tensor2 W(rows, cols);
    for (double& v : W.data) v = rng.normal();
    std::vector<double> x(std::size_t(cols), 0.0);
    std::vector<double> y(std::size_t(rows), 0.0);
    for (double& v : x) v = rng.normal();
    for (double& v : y) v = rng.normal();

    std::vector<double> got_y = y;
    matvec_add(W, x.data(), got_y.data());
    for (index_t r = 0; r < rows; ++r) {
      double want = y[std::size_t(r)];
      for (index_t c = 0; c < cols; ++c) want += W.at(r, c) * x[std::size_t(c)];
      CHECK(got_y[std::size_t(r)] == doctest::Approx(want).epsilon(1e-12));
    }

    std::vector<double> got_x = x;
    matvec_t_add(W, y.data(), got_x.data());
    for (index_t c = 0; c < cols; ++c) {
      double want = x[std::size_t(c)];
      for (index_t r = 0; r < rows; ++r) want += W.at(r, c) * y[std::size_t(r)];
      CHECK(got_x[std::size_t(c)] == doctest::Approx(want).epsilon(1e-12));
    }

    Tensor2 acc(rows, cols);
    for (double& v : acc.data) v = rng.normal();
    Tensor2 got_acc = acc;
    outer_add(got_acc, y.data(), x.data());
    for (index_t r = 0; r < rows; ++r)
      for (index_t c = 0; c < cols; ++c)
        CHECK(got_acc.at(r, c) ==
              doctest::Approx(acc.at(r, c) + y[std::size_t(r)] * x[std::size_t(c)])
                  .epsilon(1e-12));
  }
}

TEST_CASE("sgd momentum scalar steps") {
  ParamStore store;
  store.create("w", 1, 1).at(0, 0) = 1.0;
  OptimConfig cfg{0.1, 0.9, 0.0};

  store.grad("w").at(0, 0) = 0.5;
  sgd_momentum_step(store, cfg);
  CHECK(store.entry("w").velocity.at(0, 0) == doctest::Approx(-0.05).epsilon(1e-14));
  CHECK(store.value("w").at(0, 0) == doctest::Approx(0.95).epsilon(1e-14));
  CHECK(store.grad("w").at(0, 0) == 0.0);  // grads are consumed by the step

  store.grad("w").at(0, 0) = 0.5;
  sgd_momentum_step(store, cfg);
  CHECK(store.entry("w").velocity.at(0, 0) == doctest::Approx(-0.095).epsilon(1e-14));
  CHECK(store.value("w").at(0, 0) == doctest::Approx(0.855).epsilon(1e-14));
}

TEST_CASE("sgd weight decay folds into the gradient") {
  ParamStore store;
  store.create("w", 1, 1).at(0, 0) = 2.0;
  sgd_momentum_step(store, OptimConfig{0.1, 0.0, 0.5});  // g=0, decay 0.5
  CHECK(store.value("w").at(0, 0) == doctest::Approx(1.9).epsilon(1e-14));
}

TEST_CASE("optimizer config validation") {
  CHECK_NOTHROW((OptimConfig{0.0, 0.0, 0.0}).validate());  // zero lr is allowed
  CHECK_THROWS_AS((OptimConfig{-0.1, 0.9, 0.0}).validate(), config_error);
  CHECK_THROWS_AS((OptimConfig{0.1, 1.0, 0.0}).validate(), config_error);
  CHECK_THROWS_AS((OptimConfig{0.1, -0.1, 0.0}).validate(), config_error);
  CHECK_THROWS_AS((OptimConfig{0.1, 0.9, -1.0}).validate(), config_error);
}

TEST_CASE("param store bookkeeping") {
  ParamStore store;
  store.create("a", 2, 3);
  store.create("b", 4, 1);
  CHECK(store.scalar_count() == 10);
  CHECK(store.has("a"));
  CHECK(!store.has("missing"));
  CHECK_THROWS_AS(store.create("a", 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(store.value("missing"), std::invalid_argument);
  CHECK(store.entries()[0].name == "a");  // insertion order preserved
  CHECK(store.entries()[1].name == "b");
}

TEST_CASE("gradient checker accepts a correct quadratic gradient") {
  ParamStore store;
  Tensor2& w = store.create("w", 3, 2);
  Rng rng(7);
  for (double& v : w.data) v = rng.normal();

  auto loss = [](ParamStore& s) {
    double total = 0.0;
    Tensor2& val = s.value("w");
    Tensor2& g = s.grad("w");
    for (index_t i = 0; i < val.size(); ++i) {
      const double r = val.data[std::size_t(i)] - 0.25 * double(i);
      total += r * r;
      g.data[std::size_t(i)] += 2.0 * r;
    }
    return total;
  };
  CHECK(grad_check(loss, store, 1e-5) <= 1e-8);
}

TEST_CASE("gradient checker flags a wrong gradient") {
  ParamStore store;
  store.create("w", 2, 2).fill(1.5);
  auto bad_loss = [](ParamStore& s) {
    double total = 0.0;
    Tensor2& val = s.value("w");
    Tensor2& g = s.grad("w");
    for (index_t i = 0; i < val.size(); ++i) {
      total += val.data[std::size_t(i)] * val.data[std::size_t(i)];
      g.data[std::size_t(i)] += 1.7 * val.data[std::size_t(i)];  // should be 2x
    }
    return total;
  };
  CHECK(grad_check(bad_loss, store, 1e-5) > 1e-2);
}

TEST_CASE("largest remainder rounding") {
  const index_t ratio_ban[] = {6, 6, 1, 1};
  CHECK(largest_remainder_counts(ratio_ban, 256) == std::vector<index_t>{110, 110, 18, 18});
  CHECK(largest_remainder_counts(ratio_ban, 14) == std::vector<index_t>{6, 6, 1, 1});
  CHECK(largest_remainder_counts(ratio_ban, 0) == std::vector<index_t>{0, 0, 0, 0});

  const index_t ratio_head[] = {1, 3};
  CHECK(largest_remainder_counts(ratio_head, 256) == std::vector<index_t>{64, 192});

  // remainder ties go to the lower index
  const index_t even[] = {1, 1};
  CHECK(largest_remainder_counts(even, 3) == std::vector<index_t>{2, 1});

  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<index_t> ratio(1 + rng.uniform_index(5));
    for (auto& r : ratio) r = 1 + index_t(rng.uniform_index(9));
    const index_t total = index_t(rng.uniform_index(1000));
    const auto counts = largest_remainder_counts(ratio, total);
    index_t sum = 0;
    for (index_t c : counts) sum += c;
    CHECK(sum == total);  // counts always partition the batch
  }
}

TEST_CASE("rng determinism and ranges") {
  Rng a(123), b(123), c(124);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    all_equal = all_equal && x == b.uniform();
    any_diff = any_diff || x != c.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  CHECK(all_equal);
  CHECK(any_diff);

  Rng r(5);
  for (int i = 0; i < 200; ++i) {
    const auto v = r.uniform_index(7);
    CHECK(v < 7);
  }

  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
  CHECK(mix_seed(1, 0) != mix_seed(2, 0));
  CHECK(mix_seed(1, 0) == mix_seed(1, 0));
}
