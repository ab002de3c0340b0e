#include "rcone/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace rcone {

GroupGeometry::GroupGeometry(double Q, double sigmaS, double c0,
                             std::optional<int> n)
    : q_(Q), sigma_s_(sigmaS), c0_(c0), euclidean_dim_(n) {
  if (!(q_ > 0.0)) throw std::invalid_argument("GroupGeometry: Q must be positive");
  if (!(sigma_s_ > 0.0)) throw std::invalid_argument("GroupGeometry: sigmaS must be positive");
  if (!(c0_ >= 1.0)) throw std::invalid_argument("GroupGeometry: c0 must be >= 1");
}

GroupGeometry GroupGeometry::euclidean(int n) {
  if (n < 1) throw std::invalid_argument("GroupGeometry::euclidean: n must be >= 1");
  const double sigma = 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
  return GroupGeometry(static_cast<double>(n), sigma, 1.0, n);
}

GroupGeometry GroupGeometry::abstract_group(double Q, double sigmaS, double c0) {
  return GroupGeometry(Q, sigmaS, c0, std::nullopt);
}

double GroupGeometry::ball_volume(double t) const {
  return sigma_s_ * std::pow(t, q_) / q_;
}

Integral polar_integral(const GroupGeometry& geom,
                        const std::function<double(double)>& u, double a,
                        double b, const QuadratureOptions& opt) {
  if (!(a >= 0.0) || !(b > a))
    throw std::invalid_argument("polar_integral: invalid interval");
  const double Q = geom.Q();
  auto integrand = [&](double t) { return u(t) * std::pow(t, Q - 1.0); };
  Integral out;
  if (a == 0.0 && std::isinf(b)) {
    out = integrate_improper(integrand, {}, opt);
  } else {
    // Finite window: extend inward/outward classification only where needed.
    QuadratureOptions local = opt;
    local.t_min = std::max(opt.t_min * 1e-3, a > 0.0 ? a : opt.t_min * 1e-3);
    double hi = std::isinf(b) ? opt.t_max : b;
    if (a == 0.0) {
      auto clipped = [&](double t) { return t < hi ? integrand(t) : 0.0; };
      QuadratureOptions w = opt;
      w.t_max = std::max(hi, opt.t_min * 10.0);
      out = integrate_improper(clipped, {hi}, w);
    } else if (std::isinf(b)) {
      auto clipped = [&](double t) { return t > a ? integrand(t) : 0.0; };
      QuadratureOptions w = opt;
      w.t_min = std::min(a, w.t_min);
      out = integrate_improper(clipped, {a}, w);
    } else {
      out.value = integrate_composite(integrand, a, b, {}, opt);
    }
  }
  out.value *= geom.sigmaS();
  return out;
}

namespace {

// k2(R, s) = 2 ∫_0^π ((R-s)² + 4Rs sin²(θ/2))^((alpha-2)/2) dθ, evaluated on
// dyadically graded cells toward θ = 0.
double kernel_average_2d(double R, double s, double alpha) {
  const double h = std::abs(R - s);
  const double rs = R * s;
  if (rs == 0.0) {
    // One point at the origin: distance is constant max(R, s).
    const double d = std::max(R, s);
    return 2.0 * M_PI * std::pow(d, alpha - 2.0);
  }
  if (h == 0.0 && alpha <= 1.0) return kInf;
  auto integrand = [&](double theta) {
    const double sn = std::sin(0.5 * theta);
    const double d2 = h * h + 4.0 * rs * sn * sn;
    return std::pow(d2, 0.5 * (alpha - 2.0));
  };
  const double theta_star = std::max(h / std::sqrt(rs), 1e-14);
  double total = 0.0;
  double hi = M_PI;
  const double floor_theta = std::max(theta_star / 64.0, 1e-14);
  while (hi > floor_theta) {
    const double lo = std::max(0.5 * hi, floor_theta);
    total += gl_on_interval(integrand, lo, hi, 16);
    hi = lo;
  }
  // Head [0, hi]: integrand is within O((hi/theta_star)²) of its value at 0.
  if (hi > 0.0) total += integrand(0.5 * hi) * hi;
  return 2.0 * total;
}

}  // namespace

double euclidean_kernel_average(const GroupGeometry& geom, double R, double s,
                                double alpha) {
  if (!geom.euclidean_dim())
    throw std::invalid_argument("euclidean_kernel_average: geometry is not euclidean");
  const int n = *geom.euclidean_dim();
  if (!(alpha > 0.0) || !(alpha < n))
    throw std::invalid_argument("euclidean_kernel_average: alpha outside (0, n)");
  if (R < 0.0 || s < 0.0)
    throw std::invalid_argument("euclidean_kernel_average: negative radius");
  switch (n) {
    case 1: {
      const double near = std::pow(std::abs(R - s), alpha - 1.0);
      const double far = std::pow(R + s, alpha - 1.0);
      return near + far;  // IEEE: 0^(negative) = +inf at R = s
    }
    case 2:
      return kernel_average_2d(R, s, alpha);
    case 3: {
      if (R == 0.0 || s == 0.0) {
        const double d = std::max(R, s);
        return 4.0 * M_PI * std::pow(d, alpha - 3.0);
      }
      const double dm = std::abs(R - s), dp = R + s;
      if (alpha == 1.0) {
        if (dm == 0.0) return kInf;
        return 2.0 * M_PI / (R * s) * std::log(dp / dm);
      }
      return 2.0 * M_PI / (R * s * (alpha - 1.0)) *
             (std::pow(dp, alpha - 1.0) - std::pow(dm, alpha - 1.0));
    }
    default:
      throw std::invalid_argument("euclidean_kernel_average: n > 3 not supported");
  }
}

}  // namespace rcone
