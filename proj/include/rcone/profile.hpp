#pragma once

// Radial profiles: functions of the radius t > 0, either closed-form
// families or right-continuous step functions on a strictly increasing
// grid (cell i spans [t_{i-1}, t_i) with t_0 = 0; zero beyond the grid).
// DecreasingProfile is the cone of nonincreasing profiles.

#include <optional>
#include <string>
#include <vector>

#include "rcone/geometry.hpp"

namespace rcone {

// Exact description c·t^e of a profile on some cell.
struct PowerPiece {
  double coef = 0.0;
  double exponent = 0.0;
};

class RadialProfile {
 public:
  // c · t^e on (0, ∞)
  static RadialProfile power(double coef, double exponent);
  // c · t^e on (lo, hi), zero outside; hi may be +inf
  static RadialProfile power_band(double coef, double exponent, double lo,
                                  double hi);
  // height on (0, radius)
  static RadialProfile indicator(double radius, double height = 1.0);
  // min(c · t^-gamma, height) on (0, rmax); gamma > 0
  static RadialProfile truncated_power(double coef, double gamma, double height,
                                       double rmax);
  // c · exp(-rate · t)
  static RadialProfile exponential(double coef, double rate);
  // c · (shift + t)^e
  static RadialProfile shifted_power(double coef, double exponent, double shift);
  // step on grid (strictly increasing, positive radii), one value per cell
  static RadialProfile step(std::vector<double> grid, std::vector<double> values);

  double operator()(double t) const;
  // Interior kink radii, sorted (finite ones only).
  const std::vector<double>& breakpoints() const { return breaks_; }
  // Exact power description on [a, b], if the profile is c·t^e there.
  std::optional<PowerPiece> power_piece(double a, double b) const;
  // Exact power pieces adjacent to 0 / ∞ (coef 0 when the profile vanishes).
  std::optional<PowerPiece> origin_piece() const;
  std::optional<PowerPiece> tail_piece() const;

  double support_lo() const { return support_lo_; }
  double support_hi() const { return support_hi_; }  // +inf when unbounded
  bool is_zero() const;
  bool is_step() const { return family_ == Family::Step; }
  const std::vector<double>& step_grid() const;
  const std::vector<double>& step_values() const;

  std::string family_name() const;

 private:
  enum class Family { Power, PowerBand, Indicator, TruncatedPower, Exponential,
                      ShiftedPower, Step };
  RadialProfile() = default;

  Family family_ = Family::Power;
  double coef_ = 0.0, exponent_ = 0.0;
  double lo_ = 0.0, hi_ = kInf;        // band bounds / truncation data
  double height_ = 0.0, rate_ = 0.0, shift_ = 0.0;
  double switch_radius_ = 0.0;         // truncated power: plateau ends here
  std::vector<double> grid_, values_;
  std::vector<double> breaks_;
  double support_lo_ = 0.0, support_hi_ = kInf;
};

class DecreasingProfile {
 public:
  // Validates monotonicity: exactly on step grids, on a 512-point log probe
  // for closed forms. Throws std::invalid_argument on violation.
  explicit DecreasingProfile(RadialProfile p);

  double operator()(double t) const { return profile_(t); }
  const RadialProfile& profile() const { return profile_; }

 private:
  RadialProfile profile_;
};

// Least-squares nonincreasing projection of a step profile, cells weighted
// by their polar measure sigmaS · (t_i^Q - t_{i-1}^Q) / Q. Idempotent;
// preserves already-monotone inputs exactly.
DecreasingProfile project_to_decreasing(const GroupGeometry& geom,
                                        const RadialProfile& step_profile);

// Bi-radial surfaces v(t, tau) on a product group: separable closed forms or
// tensor step grids (zero outside the grid rectangle).
class BiRadialSurface {
 public:
  static BiRadialSurface separable(RadialProfile a, RadialProfile b);
  static BiRadialSurface tensor(std::vector<double> grid1,
                                std::vector<double> grid2,
                                std::vector<double> values_row_major);

  double operator()(double t, double tau) const;
  bool is_separable() const { return separable_; }
  const RadialProfile& factor1() const;
  const RadialProfile& factor2() const;
  const std::vector<double>& grid1() const { return grid1_; }
  const std::vector<double>& grid2() const { return grid2_; }
  const std::vector<double>& values() const { return values_; }

 private:
  BiRadialSurface() = default;
  bool separable_ = true;
  std::optional<RadialProfile> f1_, f2_;
  std::vector<double> grid1_, grid2_, values_;
};

class BiDecreasingProfile {
 public:
  // Nonincreasing in each variable with the other fixed.
  explicit BiDecreasingProfile(BiRadialSurface s);
  double operator()(double t, double tau) const { return surface_(t, tau); }
  const BiRadialSurface& surface() const { return surface_; }

 private:
  BiRadialSurface surface_;
};

}  // namespace rcone
