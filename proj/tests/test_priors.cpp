#include "doctest.h"

#include "ringct/errors.hpp"
#include "ringct/priors.hpp"
#include "support.hpp"

#include <cmath>

using namespace ringct;
using namespace ringct::test;

TEST_CASE("huber") {
  CHECK(huber(0.0, 0.01).value == 0.0);
  CHECK(huber(0.0, 0.01).derivative == 0.0);
  CHECK(huber(0.01, 0.01).value == doctest::Approx(0.005));
  CHECK(huber(1.0, 0.01).value == doctest::Approx(0.995));
  CHECK(huber(-1.0, 0.01).value == doctest::Approx(0.995));
  CHECK(huber(-1.0, 0.01).derivative == -1.0);

  const double d = 0.3;
  CHECK(huber(d, d).derivative == doctest::Approx(1.0));
  CHECK(huber(std::nextafter(d, 1.0), d).derivative == doctest::Approx(1.0));
  CHECK(huber(std::nextafter(d, 0.0), d).derivative == doctest::Approx(1.0));
  CHECK(huber(std::nextafter(d, 0.0), d).value == doctest::Approx(huber(std::nextafter(d, 1.0), d).value));

  for (double t : {-2.0, -0.2, 0.05, 0.29, 0.31, 1.7}) {
    const double h = 1e-6;
    const double fd = (huber(t + h, d).value - huber(t - h, d).value) / (2 * h);
    CHECK(huber(t, d).derivative == doctest::Approx(fd).epsilon(1e-8));
  }
}

TEST_CASE("total variation") {
  const std::size_t n = 12;
  SUBCASE("constant image") {
    const std::vector<double> img(n * n, 0.7);
    std::vector<double> g(n * n, 0.0);
    CHECK(tv_eval_grad(img, n, 0.01, g) == 0.0);
    for (double x : g) CHECK(x == 0.0);
  }
  SUBCASE("gradient against central differences") {
    for (std::uint32_t trial = 0; trial < 10; ++trial) {
      auto img = uniform_vector(n * n, 0.0, 1.0, 21, trial);
      // delta comparable to the differences so both Huber branches occur
      const double delta = 0.3;
      std::vector<double> g(n * n, 0.0);
      tv_eval_grad(img, n, delta, g);
      std::vector<double> fd(n * n);
      for (std::size_t k = 0; k < img.size(); ++k) {
        const double keep = img[k], h = 1e-6;
        img[k] = keep + h;
        const double fp = tv_eval_grad(img, n, delta, {});
        img[k] = keep - h;
        const double fm = tv_eval_grad(img, n, delta, {});
        img[k] = keep;
        fd[k] = (fp - fm) / (2 * h);
      }
      CHECK(rel_diff(fd, g) <= 1e-6);
    }
  }
  SUBCASE("gradient accumulates") {
    const auto img = uniform_vector(n * n, 0.0, 1.0, 22);
    std::vector<double> g(n * n, 1.0), g0(n * n, 0.0);
    tv_eval_grad(img, n, 0.05, g);
    tv_eval_grad(img, n, 0.05, g0);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(g[k] == doctest::Approx(g0[k] + 1.0));
  }
  SUBCASE("vertical edge") {
    const double h = 2.0, delta = 0.01;
    std::vector<double> img(n * n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = n / 2; c < n; ++c) img[r * n + c] = h;
    CHECK(tv_eval_grad(img, n, delta, {}) == doctest::Approx(n * (h - delta / 2)));
  }
  SUBCASE("shift invariance") {
    const auto img = uniform_vector(n * n, 0.0, 1.0, 23);
    auto shifted = img;
    for (double& x : shifted) x += 3.25;
    CHECK(tv_eval_grad(shifted, n, 0.1, {}) == doctest::Approx(tv_eval_grad(img, n, 0.1, {})).epsilon(1e-12));
  }
  SUBCASE("gradient Lipschitz bound") {
    const double delta = 0.05;
    for (std::uint32_t trial = 0; trial < 50; ++trial) {
      const auto x = uniform_vector(n * n, 0.0, 1.0, 24, trial);
      auto y = x;
      const auto pert = uniform_vector(n * n, -0.1, 0.1, 25, trial);
      for (std::size_t k = 0; k < y.size(); ++k) y[k] += pert[k];
      std::vector<double> gx(n * n, 0.0), gy(n * n, 0.0), dg(n * n);
      tv_eval_grad(x, n, delta, gx);
      tv_eval_grad(y, n, delta, gy);
      for (std::size_t k = 0; k < dg.size(); ++k) dg[k] = gx[k] - gy[k];
      CHECK(norm(dg) <= tv_lipschitz(delta) * norm(pert) * (1.0 + 1e-12));
    }
    CHECK(tv_lipschitz(0.01) == doctest::Approx(800.0));
  }
}

TEST_CASE("nonnegative projection") {
  std::vector<double> neg{-1.0, -0.5, -1e-300};
  project_nonneg(neg);
  CHECK(neg == std::vector<double>(3, 0.0));
  std::vector<double> pos{0.0, 2.0, 1e-300};
  const auto keep = pos;
  project_nonneg(pos);
  CHECK(pos == keep);
  auto x = uniform_vector(50, -1.0, 1.0, 26);
  project_nonneg(x);
  auto y = x;
  project_nonneg(y);
  CHECK(x == y);
}

TEST_CASE("hyperparameter strategies") {
  const std::vector<double> vf{5.0, 2.0};
  Sinogram flats = Sinogram::zeros(2, 2, SinogramKind::counts);
  flats.values = {4, 6, 1, 3};

  const FlatPrior up = make_hyperparams({FlatPriorKind::uniform, 0.0}, vf, 2, flats);
  CHECK(up.alpha == std::vector<double>{1.0, 1.0});
  CHECK(up.beta == std::vector<double>{0.0, 0.0});
  CHECK_FALSE(up.amap_equivalent);

  const FlatPrior jp = make_hyperparams({FlatPriorKind::jeffreys, 0.0}, vf, 2, flats);
  CHECK(jp.alpha == std::vector<double>{0.5, 0.5});
  CHECK(jp.beta == std::vector<double>{0.0, 0.0});

  const FlatPrior fe = make_hyperparams({FlatPriorKind::flatfield_emphasizing, 10.0}, vf, 2, flats);
  CHECK(fe.alpha == std::vector<double>{51.0, 21.0});
  CHECK(fe.beta == std::vector<double>{10.0, 10.0});

  const FlatPrior fe0 = make_hyperparams({FlatPriorKind::flatfield_emphasizing, 0.0}, vf, 2, flats);
  CHECK(fe0.alpha == up.alpha);
  CHECK(fe0.beta == up.beta);

  CHECK_THROWS_AS(make_hyperparams({FlatPriorKind::flatfield_emphasizing, -1.0}, vf, 2, flats),
                  InvalidArgument);

  const FlatPrior t2 = make_hyperparams({FlatPriorKind::type2, 0.0}, vf, 2, flats);
  CHECK(t2.amap_equivalent);
  CHECK(t2.degenerate_detectors.empty());
  flats.values = {4, 6, 0, 0};
  const FlatPrior t2z = make_hyperparams({FlatPriorKind::type2, 0.0}, std::vector<double>{5.0, 0.0}, 2, flats);
  CHECK(t2z.degenerate_detectors == std::vector<std::size_t>{1});
}

TEST_CASE("type-II marginal") {
  const Kappa k3 = type2_kappa(1.0, 3);
  CHECK(k3.first == doctest::Approx(-(1.0 + 0.5 + 1.0 / 3.0) + std::log(4.0)).epsilon(1e-14));
  CHECK(k3.first == doctest::Approx(-0.4471).epsilon(1e-4));

  CHECK(type2_kappa(2.5, 0).first == 0.0);
  CHECK_THROWS_AS(type2_kappa(0.0, 3), InvalidArgument);
  CHECK_THROWS_AS(type2_kappa(-1.0, 3), InvalidArgument);

  for (double alpha : {0.1, 0.3, 1.0, 2.0, 5.0, 10.0, 30.0, 100.0})
    for (std::int64_t k = 1; k <= 50; ++k) {
      CAPTURE(alpha);
      CAPTURE(k);
      const Kappa kp = type2_kappa(alpha, k);
      CHECK(kp.first < 0.0);
      CHECK(kp.second > 0.0);
    }

  // derivatives agree with differences of the log-gamma value
  for (double alpha : {0.4, 3.0, 40.0})
    for (std::int64_t k : {1, 7, 40}) {
      const double h = 1e-5 * alpha;
      const double d1 = (type2_kappa(alpha + h, k).value - type2_kappa(alpha - h, k).value) / (2 * h);
      const double d2 = (type2_kappa(alpha + h, k).first - type2_kappa(alpha - h, k).first) / (2 * h);
      const Kappa kp = type2_kappa(alpha, k);
      CHECK(kp.first == doctest::Approx(d1).epsilon(1e-6).scale(1e-9));
      CHECK(kp.second == doctest::Approx(d2).epsilon(1e-5).scale(1e-9));
    }
}
