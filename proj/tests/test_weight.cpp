#include "doctest.h"

#include <cmath>

#include <stdexcept>

#include "oracles.hpp"
#include "rcone/weight.hpp"

using namespace rcone;

namespace {
const GroupGeometry kR1 = GroupGeometry::euclidean(1);
const GroupGeometry kR2 = GroupGeometry::euclidean(2);
}  // namespace

TEST_CASE("cumulative of simple weights") {
  RadialWeight w(kR1, RadialProfile::power(1.0, 0.0));
  CHECK(w.cumulative(3.0) == doctest::Approx(6.0));

  // (Q=4, sigmaS=4), w = s^-2: W(2) = 4 ∫_0^2 s dsi = 8
  auto g = GroupGeometry::abstract_group(4.0, 4.0, 1.0);
  RadialWeight w2(g, RadialProfile::power(1.0, -2.0));
  CHECK(w2.cumulative(2.0) == doctest::Approx(8.0));

  // R^2, w = s^-3: s^-3 · s non-integrable at 0
  RadialWeight w3(kR2, RadialProfile::power(1.0, -3.0));
  CHECK(w3.origin_divergent());
  CHECK(std::isinf(w3.cumulative(1.0)));
}

TEST_CASE("cumulative is nondecreasing and continuous across cells") {
  RadialWeight w(kR1, RadialProfile::truncated_power(1.0, 0.7, 3.0, 50.0));
  double prev = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double t = 1e-5 * std::pow(1e10, i / 4000.0);
    const double cur = w.cumulative(t);
    CHECK(cur >= prev - 1e-12 * std::max(1.0, prev));
    prev = cur;
  }
}

TEST_CASE("product weights factorize their cumulative") {
  RadialWeight w1(kR1, RadialProfile::power(1.0, 0.0));
  RadialWeight w2(kR1, RadialProfile::power(2.0, -0.5));
  ProductWeight pw(w1, w2);
  for (double t : {0.3, 1.0, 7.0})
    for (double tau : {0.5, 2.0})
      CHECK(pw.cumulative(t, tau) ==
            doctest::Approx(w1.cumulative(t) * w2.cumulative(tau)));
}

TEST_CASE("total mass verdicts") {
  CHECK(total_mass(RadialWeight(kR1, RadialProfile::power(1.0, 0.0))).verdict ==
        Verdict::Infinite);
  auto finite = total_mass(RadialWeight(kR1, RadialProfile::shifted_power(1.0, -3.0, 1.0)));
  CHECK(finite.verdict == Verdict::Finite);
  CHECK(finite.value == doctest::Approx(1.0).epsilon(1e-6));  // 2∫_0^∞ (1+s)^-3 ds
  // R^2, w = s^-2: borderline t^-1 tail diverges
  CHECK(total_mass(RadialWeight(kR2, RadialProfile::power(1.0, -2.0))).verdict ==
        Verdict::Infinite);
  CHECK(total_mass(RadialWeight(kR1, RadialProfile::exponential(1.0, 1.0))).verdict ==
        Verdict::Finite);
}

TEST_CASE("moment tables: ball and tail with power factors") {
  // F(t) = 2 ∫_0^t s^{1/2} s^{-1/2} ds = 2t  (v = s^-1/2, gamma = 1/2 on R^1)
  RadialWeight v(kR1, RadialProfile::power(1.0, -0.5));
  MomentTable tab(kR1, v.profile(), 1.0, 0.5, {}, {});
  CHECK(tab.ball(3.0) == doctest::Approx(6.0));
  CHECK(tab.ball_at_zero().kind == EndBehavior::Kind::Power);
  CHECK(tab.ball_at_zero().exponent == doctest::Approx(1.0));
  CHECK(tab.ball_at_zero().exact);
  CHECK(tab.tail_at_inf().kind == EndBehavior::Kind::AlwaysInf);

  // global exact power ball
  auto g = tab.global_power_ball();
  REQUIRE(g.has_value());
  CHECK(g->coef == doctest::Approx(2.0));
  CHECK(g->exponent == doctest::Approx(1.0));
}

TEST_CASE("moment tables: cumulative factors (W^-p')") {
  // w ≡ 1 on R^1: integrand s^2 W^-2 w s^0 = s^2 (2s)^-2 = 1/4; ball = 2·t/4
  RadialWeight w(kR1, RadialProfile::power(1.0, 0.0));
  MomentTable tab(kR1, w.profile(), 1.0, 2.0,
                  {{&w.mass_table(), -2.0}}, {});
  CHECK(tab.ball(1.0) == doctest::Approx(0.5));
  CHECK(tab.ball(4.0) == doctest::Approx(2.0));
  // exact end behaviour: ball ~ t/2 at 0
  CHECK(tab.ball_at_zero().exact);
  CHECK(tab.ball_at_zero().exponent == doctest::Approx(1.0));
  CHECK(tab.ball_at_zero().coef == doctest::Approx(0.5));

  // tail factor of F3 in the borderline case: s^1 (2s)^-2 -> exponent -1, divergent
  MomentTable f3(kR1, w.profile(), 1.0, 1.0, {{&w.mass_table(), -2.0}}, {});
  CHECK(std::isinf(f3.tail(1.0)));
  CHECK(f3.tail_at_zero().kind == EndBehavior::Kind::AlwaysInf);
}

TEST_CASE("moment tables: pointwise powers and vanishing weights") {
  // u = indicator(0,1), exponent 1-p' = -1: u^-1 = inf beyond 1
  RadialWeight u(kR1, RadialProfile::indicator(1.0));
  MomentTable tab(kR1, u.profile(), -1.0, 0.0, {}, {});
  CHECK(tab.ball(0.5) == doctest::Approx(1.0));
  CHECK(tab.ball(1.0) == doctest::Approx(2.0));
  CHECK(std::isinf(tab.ball(1.5)));
  CHECK(std::isinf(tab.tail(0.5)));

  // W^-p' over a weight with no mass near zero: poisoned near the origin
  RadialWeight far(kR1, RadialProfile::power_band(1.0, 0.0, 1.0, kInf));
  RadialWeight vfull(kR1, RadialProfile::power(1.0, 0.0));
  MomentTable pois(kR1, vfull.profile(), 1.0, 0.0,
                   {{&far.mass_table(), -2.0}}, {});
  CHECK(std::isinf(pois.ball(0.5)));
  CHECK(std::isinf(pois.ball(2.0)));
  CHECK(pois.ball_at_zero().kind == EndBehavior::Kind::AlwaysInf);
}

TEST_CASE("moment tables agree with raw quadrature on mixed weights") {
  RadialWeight w(kR2, RadialProfile::truncated_power(2.0, 1.5, 5.0, 20.0));
  MomentTable tab(kR2, w.profile(), 1.0, 0.8, {}, {});
  for (double t : {0.3, 2.0, 15.0}) {
    const double ref = oracle::simpson(
        [&](double s) { return 2.0 * M_PI * w(s) * std::pow(s, 1.8) ; }, 1e-12, t,
        200000);
    CHECK(tab.ball(t) == doctest::Approx(ref).epsilon(1e-6));
  }
}

TEST_CASE("bi-moment tables: separable vs tensor") {
  auto sep = BiRadialSurface::separable(RadialProfile::indicator(1.0, 2.0),
                                        RadialProfile::indicator(2.0, 3.0));
  ProductGeometry pg{kR1, kR1};
  BiMomentTable t1(pg, sep, 1.0, 0.0, 0.0, {});
  // BB(t,tau) = (2·2·min(t,1)) · (3·2·min(tau,2))
  CHECK(t1.rect(RegionKind::BallBall, 0.5, 1.0) == doctest::Approx(2.0 * 6.0));
  CHECK(t1.rect(RegionKind::BallTail, 0.5, 1.0) == doctest::Approx(2.0 * 6.0));
  CHECK(t1.rect(RegionKind::TailTail, 3.0, 3.0) == 0.0);

  // same surface as a tensor grid
  auto ten = BiRadialSurface::tensor({1.0}, {2.0}, {6.0});
  BiMomentTable t2(pg, ten, 1.0, 0.0, 0.0, {});
  for (double t : {0.25, 0.8, 2.0})
    for (double tau : {0.5, 1.7, 4.0}) {
      CHECK(t2.rect(RegionKind::BallBall, t, tau) ==
            doctest::Approx(t1.rect(RegionKind::BallBall, t, tau)));
      CHECK(t2.rect(RegionKind::BallTail, t, tau) ==
            doctest::Approx(t1.rect(RegionKind::BallTail, t, tau)));
      CHECK(t2.rect(RegionKind::TailBall, t, tau) ==
            doctest::Approx(t1.rect(RegionKind::TailBall, t, tau)));
      CHECK(t2.rect(RegionKind::TailTail, t, tau) ==
            doctest::Approx(t1.rect(RegionKind::TailTail, t, tau)));
    }
}

TEST_CASE("weight construction rejections") {
  CHECK_THROWS_AS(RadialWeight(kR1, RadialProfile::power(0.0, 1.0)),
                  std::invalid_argument);
  CHECK(RadialWeight(kR1, RadialProfile::indicator(1.0)).positive_on_probes() ==
        false);
  CHECK(RadialWeight(kR1, RadialProfile::power(1.0, -0.1)).positive_on_probes());
}
