#include "doctest.h"

#include <cmath>

#include <stdexcept>

#include "oracles.hpp"
#include "rcone/geometry.hpp"

using namespace rcone;

TEST_CASE("group geometry invariants") {
  auto r1 = GroupGeometry::euclidean(1);
  CHECK(r1.Q() == 1.0);
  CHECK(r1.sigmaS() == doctest::Approx(2.0));
  CHECK(r1.c0() == 1.0);

  auto r2 = GroupGeometry::euclidean(2);
  CHECK(r2.sigmaS() == doctest::Approx(2.0 * M_PI));

  auto r3 = GroupGeometry::euclidean(3);
  CHECK(r3.sigmaS() == doctest::Approx(4.0 * M_PI));

  auto g = GroupGeometry::abstract_group(4.0, 4.0, 2.0);
  CHECK(g.ball_volume(1.0) == doctest::Approx(1.0));

  CHECK_THROWS_AS(GroupGeometry::abstract_group(-1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GroupGeometry::abstract_group(1.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("polar integral: ball volumes") {
  auto r1 = GroupGeometry::euclidean(1);
  auto v = polar_integral(r1, [](double) { return 1.0; }, 0.0, 3.0);
  CHECK(v.finite());
  CHECK(v.value == doctest::Approx(6.0));  // 2t at t=3

  auto g = GroupGeometry::abstract_group(4.0, 1.5, 1.0);
  v = polar_integral(g, [](double) { return 1.0; }, 0.0, 2.0);
  CHECK(v.value == doctest::Approx(1.5 * 16.0 / 4.0));
}

TEST_CASE("polar integral matches cartesian tensor quadrature") {
  auto r2 = GroupGeometry::euclidean(2);
  auto gauss = [](double t) { return std::exp(-t * t); };
  auto v = polar_integral(r2, gauss, 0.0, kInf);
  CHECK(v.finite());
  CHECK(v.value == doctest::Approx(M_PI).epsilon(1e-9));
  const double cart = oracle::cartesian_radial_2d(gauss, 8.0);
  CHECK(std::abs(v.value - cart) / cart < 1e-6);

  auto r1 = GroupGeometry::euclidean(1);
  auto lorentz = [](double t) { return 1.0 / (1.0 + t * t); };
  v = polar_integral(r1, lorentz, 0.0, kInf);
  CHECK(v.value == doctest::Approx(M_PI).epsilon(1e-7));
}

TEST_CASE("polar integral flags divergent tails") {
  auto r1 = GroupGeometry::euclidean(1);
  auto v = polar_integral(r1, [](double) { return 1.0; }, 0.0, kInf);
  CHECK(v.verdict == Verdict::Infinite);
  CHECK_THROWS_AS(polar_integral(r1, [](double) { return 1.0; }, 2.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("dilation covariance of the polar measure") {
  auto g = GroupGeometry::abstract_group(2.5, 3.0, 1.5);
  auto u = [](double t) { return std::exp(-t) * (1.0 + t); };
  const double lambda = 3.7, T = 2.0;
  auto base = polar_integral(g, u, 0.0, T);
  auto scaled =
      polar_integral(g, [&](double t) { return u(t / lambda); }, 0.0, lambda * T);
  CHECK(scaled.value ==
        doctest::Approx(std::pow(lambda, g.Q()) * base.value).epsilon(1e-9));
}

TEST_CASE("euclidean kernel average, n = 1 closed form") {
  auto r1 = GroupGeometry::euclidean(1);
  // k(0, s) = 2 s^(alpha-1)
  CHECK(euclidean_kernel_average(r1, 0.0, 4.0, 0.5) ==
        doctest::Approx(2.0 * std::pow(4.0, -0.5)));
  // symmetry in (R, s)
  CHECK(euclidean_kernel_average(r1, 2.0, 0.7, 0.5) ==
        doctest::Approx(euclidean_kernel_average(r1, 0.7, 2.0, 0.5)));
  // integrated against f ≡ 1 on (0,1) at R = 2: 2(√3 - 1)
  const double v = oracle::simpson(
      [&](double s) { return euclidean_kernel_average(r1, 2.0, s, 0.5); }, 1e-9,
      1.0, 4000);
  CHECK(v == doctest::Approx(2.0 * (std::sqrt(3.0) - 1.0)).epsilon(1e-5));
  CHECK_THROWS_AS(euclidean_kernel_average(r1, 1.0, 1.0, 1.5), std::invalid_argument);
}

TEST_CASE("euclidean kernel average, n = 2 vs brute force") {
  auto r2 = GroupGeometry::euclidean(2);
  // brute-force the angular average at a few (R, s, alpha)
  for (double alpha : {0.5, 1.0, 1.5}) {
    for (auto [R, s] : {std::pair{1.0, 0.3}, {1.0, 2.5}, {0.2, 3.0}}) {
      const double ref = oracle::simpson(
          [&](double th) {
            const double d2 = R * R + s * s - 2.0 * R * s * std::cos(th);
            return std::pow(d2, 0.5 * (alpha - 2.0));
          },
          0.0, 2.0 * M_PI, 20000);
      const double got = euclidean_kernel_average(r2, R, s, alpha);
      CHECK(std::abs(got - ref) / ref < 1e-6);
    }
  }
  // diagonal: divergent for alpha <= 1, finite for alpha > 1
  CHECK(std::isinf(euclidean_kernel_average(r2, 1.0, 1.0, 1.0)));
  CHECK(std::isfinite(euclidean_kernel_average(r2, 1.0, 1.0, 1.5)));
}

TEST_CASE("euclidean kernel average, n = 3 closed form vs quadrature") {
  auto r3 = GroupGeometry::euclidean(3);
  for (double alpha : {0.8, 1.0, 2.2}) {
    const double R = 1.3, s = 0.4;
    const double ref = oracle::simpson(
        [&](double c) {
          const double d2 = R * R + s * s - 2.0 * R * s * c;
          return 2.0 * M_PI * std::pow(d2, 0.5 * (alpha - 3.0));
        },
        -1.0, 1.0, 20000);
    CHECK(euclidean_kernel_average(r3, R, s, alpha) ==
          doctest::Approx(ref).epsilon(1e-8));
  }
}
