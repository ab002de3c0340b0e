#pragma once

// Log-grid quadrature engine for radial integrals.
//
// Everything in this library reduces to 1D integrals of the form
//   ∫ u(s) s^g ds  over an interval of (0, ∞),
// where u is piecewise smooth with power-type behaviour at 0 and ∞ and the
// only admissible singularities are power factors s^g and |t0 - s|^(a-1).
// The engine integrates power pieces in closed form on each cell, uses
// Gauss-Legendre in log space for smooth pieces, removes |t0 - s|^(a-1)
// kinks by the exact substitution z = |t0 - s|^a, and classifies improper
// ends by exact piece exponents or by power fits on the outermost decades.

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace rcone {

enum class Verdict { Finite, Infinite, Indeterminate };

const char* to_string(Verdict v);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Growth exponents of an integrand (or scanned functional) at both ends.
// `exact` marks exponents known from closed-form pieces rather than fits.
struct TailDiagnostics {
  double origin_exponent = 0.0;
  double tail_exponent = 0.0;
  bool origin_exact = false;
  bool tail_exact = false;
};

struct Integral {
  double value = 0.0;  // finite value, or the partial value when divergent
  Verdict verdict = Verdict::Finite;
  TailDiagnostics diag;

  bool finite() const { return verdict == Verdict::Finite; }
};

struct QuadratureOptions {
  double t_min = 1e-6;
  double t_max = 1e6;
  int cells_per_decade = 8;
  int gl_order = 12;
  // |fitted exponent + 1| below this band is reported Indeterminate.
  double borderline_band = 0.02;
};

// Exact ∫_a^b c s^e ds with 0 <= a < b <= ∞; divergent ends classified.
Integral power_integral(double coef, double exponent, double a, double b);

// Antiderivative difference of s^e on [a,b], finite a,b > 0.
double power_primitive(double exponent, double a, double b);

// Gauss-Legendre nodes/weights on [-1, 1]; order in a small supported set.
const std::vector<double>& gl_nodes(int order);
const std::vector<double>& gl_weights(int order);

double gl_on_interval(const std::function<double(double)>& f, double a,
                      double b, int order);

// Composite integration of f over [a, b] (0 < a < b < ∞): splits at the
// supplied breakpoints and uses log-spaced Gauss-Legendre cells.
double integrate_composite(const std::function<double(double)>& f, double a,
                           double b, std::vector<double> breaks,
                           const QuadratureOptions& opt = {});

// ∫_a^b g(s) |t0 - s|^(alpha-1) ds with [a, b] on one side of t0 and g
// smooth on (a, b). The power factor is absorbed exactly by z = |t0-s|^alpha.
double integrate_edge_power(const std::function<double(double)>& g, double a,
                            double b, double t0, double alpha,
                            const QuadratureOptions& opt = {});

// Least-squares power fit of f over [t_lo, t_hi] (log-log slope).
struct PowerFit {
  double exponent = 0.0;
  double coef = 0.0;
  bool reliable = false;
  bool all_zero = false;       // f vanished at every sample
  double slope_spread = 0.0;   // |slope(first half) - slope(second half)|
};
PowerFit fit_power(const std::function<double(double)>& f, double t_lo,
                   double t_hi);

// Improper integral of f over (0, ∞). Numeric on [t_min, t_max]; the ends
// are classified and extrapolated by power fits (or zero when f vanishes).
Integral integrate_improper(const std::function<double(double)>& f,
                            std::vector<double> breaks,
                            const QuadratureOptions& opt = {});

}  // namespace rcone
