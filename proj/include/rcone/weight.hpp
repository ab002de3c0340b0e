#pragma once

// Radial weights, their cumulative functions, and the moment-table engine
// behind every ball/tail functional in the condition machinery:
//
//   F(t) = sigmaS · ∫ u(s)^{ue} · Π_k [M_k(s)]^{e_k} · s^{g + Q - 1} ds
//
// over (0, t) or (t, ∞), where each M_k is itself the ball function of
// another table (cumulative weights W, cumulative test functions H, ...).
// Tables are immutable after construction; all queries are lock-free.

#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "rcone/geometry.hpp"
#include "rcone/profile.hpp"

namespace rcone {

// Asymptotic behaviour of a ball/tail functional at one end of (0, ∞).
struct EndBehavior {
  enum class Kind {
    Zero,       // exactly zero on a neighbourhood of the end
    Const,      // tends to a positive constant
    Power,      // ~ coef · t^exponent
    LogGrowth,  // diverges logarithmically (power exponent 0)
    AlwaysInf,  // the functional is +inf at every t on this side
    Unknown
  };
  Kind kind = Kind::Unknown;
  double exponent = 0.0;
  double coef = 0.0;
  bool exact = false;
};

class MomentTable;

struct CumFactor {
  const MomentTable* ref = nullptr;
  double exponent = 0.0;
};

// Pointwise factor: a RadialProfile (enables closed-form cells) or a bare
// callable with breakpoint hints (always numeric).
struct CallableFactor {
  std::function<double(double)> eval;
  std::vector<double> breaks;
};

class MomentTable {
 public:
  MomentTable(const GroupGeometry& geom, RadialProfile u, double u_exp,
              double s_power, std::vector<CumFactor> cums,
              QuadratureOptions opt = {});
  MomentTable(const GroupGeometry& geom, CallableFactor u, double s_power,
              std::vector<CumFactor> cums, QuadratureOptions opt = {});

  double ball(double t) const;  // +inf where divergent/poisoned
  double tail(double t) const;
  Integral total() const;

  const EndBehavior& ball_at_zero() const { return ball0_; }
  const EndBehavior& ball_at_inf() const { return ball_inf_; }
  const EndBehavior& tail_at_zero() const { return tail0_; }
  const EndBehavior& tail_at_inf() const { return tail_inf_; }

  // ball(s) = coef · s^exponent exactly on (0, head_exact_radius())?
  std::optional<PowerPiece> head_power() const;
  double head_exact_radius() const { return head_delta_; }
  // ball(s) = coef · s^exponent exactly on all of (0, ∞)?
  std::optional<PowerPiece> global_power_ball() const { return global_ball_; }
  // ball(s) = coef · s^exponent exactly on [a, b]?
  std::optional<PowerPiece> ball_power_on(double a, double b) const;
  // smallest radius with ball(t) > 0
  double positive_from() const { return positive_from_; }
  bool used_fits() const { return any_fit_; }

  std::vector<double> breakpoints() const;
  const GroupGeometry& geometry() const { return geom_; }

 private:
  void build(QuadratureOptions opt);
  double base_eval(double s) const;  // integrand without the sigmaS factor
  double cell_partial(size_t idx, double from, double to) const;
  double head_value(double t) const;
  double beyond_value(double from, double to) const;  // [from, to], from >= t_max

  struct Cell {
    double lo, hi;
    double value;
    std::optional<PowerPiece> exact;  // integrand = coef·s^exponent on cell
  };

  GroupGeometry geom_;
  std::optional<RadialProfile> u_profile_;
  std::optional<CallableFactor> u_callable_;
  double u_exp_ = 1.0;
  double s_power_ = 0.0;
  std::vector<CumFactor> cums_;
  QuadratureOptions opt_;

  std::vector<Cell> cells_;
  std::vector<double> prefix_, suffix_;
  double head_total_ = 0.0;
  double beyond_total_ = 0.0;  // finite tail mass past t_max (0 if divergent)
  std::optional<PowerPiece> head_integrand_;  // exact integrand power near 0
  double head_delta_ = 0.0;
  bool head_is_zero_ = false;
  double fitted_head_exp_ = 0.0;
  std::optional<PowerPiece> tail_integrand_;  // exact integrand power near ∞
  double tail_from_ = kInf;                   // radius where it becomes valid
  bool tail_is_zero_ = false;
  double fitted_tail_exp_ = 0.0;
  bool all_zero_ = false;
  bool all_inf_ = false;
  bool any_fit_ = false;
  double positive_from_ = 0.0;
  double poison_ball_from_ = kInf;  // ball(t) = inf for t > this
  double poison_tail_upto_ = 0.0;   // tail(t) = inf for t < this
  double lo_edge_ = 0.0, hi_edge_ = 0.0;
  Verdict origin_verdict_ = Verdict::Finite;
  Verdict tail_verdict_ = Verdict::Finite;
  EndBehavior ball0_, ball_inf_, tail0_, tail_inf_;
  std::optional<PowerPiece> global_ball_;
};

class RadialWeight {
 public:
  RadialWeight(const GroupGeometry& geom, RadialProfile profile,
               QuadratureOptions opt = {});

  const GroupGeometry& geometry() const { return geom_; }
  const RadialProfile& profile() const { return profile_; }
  double operator()(double t) const { return profile_(t); }

  // W(t) = sigmaS ∫_0^t w(s) s^{Q-1} ds; +inf when w is too singular at 0.
  double cumulative(double t) const { return mass_->ball(t); }
  bool origin_divergent() const;
  Integral total_mass() const { return mass_->total(); }
  const MomentTable& mass_table() const { return *mass_; }

  // Positive at every probe point of (0, ∞)? (w-side hypothesis checks.)
  bool positive_on_probes() const;

 private:
  GroupGeometry geom_;
  RadialProfile profile_;
  std::shared_ptr<MomentTable> mass_;
};

// Verdict for the hypothesis ||w||_L1 = ∞ (value + tail diagnostics).
Integral total_mass(const RadialWeight& w);

class BiMomentTable;

class ProductWeight {
 public:
  ProductWeight(RadialWeight w1, RadialWeight w2);  // w(x,y) = w1(x) w2(y)
  ProductWeight(const ProductGeometry& geom, BiRadialSurface surface,
                QuadratureOptions opt = {});

  bool is_product() const { return w1_.has_value(); }
  const RadialWeight& factor1() const;
  const RadialWeight& factor2() const;
  const BiRadialSurface& surface() const;
  const ProductGeometry& geometry() const { return geom_; }

  double operator()(double t, double tau) const;
  double cumulative(double t, double tau) const;  // W(t,τ); = W1(t)·W2(τ) in product form

 private:
  ProductGeometry geom_;
  std::optional<RadialWeight> w1_, w2_;
  std::optional<BiRadialSurface> surface_;
  std::shared_ptr<BiMomentTable> mass_;
};

enum class RegionKind { BallBall, BallTail, TailBall, TailTail };

// 2D rectangle moments of a bi-radial surface:
//   F(t,τ) = ∫∫_{region} u(s,σ)^{ue} s^{g1+Q1-1} σ^{g2+Q2-1} sigmaS1 sigmaS2 ds dσ.
// Separable surfaces factor into two MomentTables; tensor surfaces use exact
// per-cell moments with O(1) prefix-sum queries. Tensor surfaces are zero
// outside their grid (unbounded regions with ue < 0 are therefore +inf).
class BiMomentTable {
 public:
  BiMomentTable(const ProductGeometry& geom, BiRadialSurface u, double u_exp,
                double g1, double g2, QuadratureOptions opt = {});

  double rect(RegionKind k, double t, double tau) const;
  // End behaviour per axis (the other variable held in the finite interior).
  const EndBehavior& axis1_zero() const { return a1_zero_; }
  const EndBehavior& axis1_inf() const { return a1_inf_; }
  const EndBehavior& axis2_zero() const { return a2_zero_; }
  const EndBehavior& axis2_inf() const { return a2_inf_; }
  std::vector<double> breakpoints1() const;
  std::vector<double> breakpoints2() const;

 private:
  double tensor_bb(double t, double tau) const;

  ProductGeometry geom_;
  bool separable_ = true;
  std::shared_ptr<MomentTable> m1_, m2_;  // separable route
  // tensor route
  BiRadialSurface surface_{BiRadialSurface::separable(
      RadialProfile::power(0, 0), RadialProfile::power(0, 0))};
  double u_exp_ = 1.0;
  double g1_ = 0.0, g2_ = 0.0;
  std::vector<double> amass_, bmass_;     // full-cell axis moments
  std::vector<double> acum_, bcum_;       // prefix sums of axis moments
  std::vector<double> vals_;              // powered cell values
  std::vector<double> pref_;              // 2D prefix of vals·amass·bmass
  bool has_zero_cell_ = false;
  std::vector<int> zero_pref_;
  bool axis1_origin_divergent_ = false, axis2_origin_divergent_ = false;
  EndBehavior a1_zero_, a1_inf_, a2_zero_, a2_inf_;
};

}  // namespace rcone
