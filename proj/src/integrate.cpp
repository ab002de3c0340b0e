#include "rcone/integrate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace rcone {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Finite: return "finite";
    case Verdict::Infinite: return "infinite";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "?";
}

double power_primitive(double exponent, double a, double b) {
  if (exponent == -1.0) return std::log(b / a);
  const double e1 = exponent + 1.0;
  return (std::pow(b, e1) - std::pow(a, e1)) / e1;
}

Integral power_integral(double coef, double exponent, double a, double b) {
  Integral out;
  out.diag.origin_exponent = exponent;
  out.diag.tail_exponent = exponent;
  out.diag.origin_exact = true;
  out.diag.tail_exact = true;
  if (a < 0.0 || b < a) throw std::invalid_argument("power_integral: bad interval");
  if (coef == 0.0 || a == b) return out;
  const bool from_zero = (a == 0.0);
  const bool to_inf = std::isinf(b);
  if (from_zero && exponent <= -1.0) {
    out.verdict = Verdict::Infinite;
    out.value = coef * power_primitive(exponent, 1.0, to_inf ? 2.0 : b);
    return out;
  }
  if (to_inf && exponent >= -1.0) {
    out.verdict = Verdict::Infinite;
    out.value = from_zero ? 0.0 : coef * power_primitive(exponent, a, 2.0 * a);
    return out;
  }
  double lo_term = from_zero ? 0.0 : std::pow(a, exponent + 1.0);
  double hi_term = to_inf ? 0.0 : std::pow(b, exponent + 1.0);
  if (exponent == -1.0) {
    out.value = coef * std::log(b / a);
  } else {
    out.value = coef * (hi_term - lo_term) / (exponent + 1.0);
  }
  return out;
}

namespace {

// Newton iteration on Legendre polynomials; computed once per order.
std::vector<std::pair<std::vector<double>, std::vector<double>>> make_gl(int n) {
  std::vector<double> nodes(n), weights(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return {{nodes, weights}};
}

const std::pair<std::vector<double>, std::vector<double>>& gl_table(int order) {
  static std::mutex mu;
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> tables;
  std::lock_guard<std::mutex> lock(mu);
  auto it = tables.find(order);
  if (it == tables.end()) {
    it = tables.emplace(order, make_gl(order).front()).first;
  }
  return it->second;
}

}  // namespace

const std::vector<double>& gl_nodes(int order) { return gl_table(order).first; }
const std::vector<double>& gl_weights(int order) { return gl_table(order).second; }

double gl_on_interval(const std::function<double(double)>& f, double a,
                      double b, int order) {
  const auto& xs = gl_nodes(order);
  const auto& ws = gl_weights(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) sum += ws[i] * f(mid + half * xs[i]);
  return half * sum;
}

double integrate_composite(const std::function<double(double)>& f, double a,
                           double b, std::vector<double> breaks,
                           const QuadratureOptions& opt) {
  if (!(a > 0.0) || !(b > a) || std::isinf(b))
    throw std::invalid_argument("integrate_composite: need 0 < a < b < inf");
  std::vector<double> edges{a, b};
  for (double t : breaks)
    if (t > a && t < b) edges.push_back(t);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](double x, double y) { return std::abs(x - y) <= 1e-14 * std::max(x, y); }),
              edges.end());
  const double cell_log = std::log(10.0) / opt.cells_per_decade;
  double total = 0.0;
  for (size_t i = 0; i + 1 < edges.size(); ++i) {
    const double lo = edges[i], hi = edges[i + 1];
    const double width = std::log(hi / lo);
    const int ncells = std::max(1, static_cast<int>(std::ceil(width / cell_log)));
    const double ulo = std::log(lo);
    for (int c = 0; c < ncells; ++c) {
      const double u0 = ulo + width * c / ncells;
      const double u1 = ulo + width * (c + 1) / ncells;
      // log substitution: ∫ f(s) ds = ∫ f(e^u) e^u du
      total += gl_on_interval(
          [&](double u) {
            const double s = std::exp(u);
            return f(s) * s;
          },
          u0, u1, opt.gl_order);
    }
  }
  return total;
}

double integrate_edge_power(const std::function<double(double)>& g, double a,
                            double b, double t0, double alpha,
                            const QuadratureOptions& opt) {
  if (!(alpha > 0.0)) throw std::invalid_argument("integrate_edge_power: alpha <= 0");
  if (!(b > a)) return 0.0;
  // Map to distance from the kink: d in [d_lo, d_hi], one-sided.
  double d_lo, d_hi;
  bool left;  // interval lies left of t0
  if (b <= t0) {
    left = true;
    d_lo = t0 - b;
    d_hi = t0 - a;
  } else if (a >= t0) {
    left = false;
    d_lo = a - t0;
    d_hi = b - t0;
  } else {
    throw std::invalid_argument("integrate_edge_power: interval straddles kink");
  }
  const double z_hi = std::pow(d_hi, alpha);
  const double z_lo = (d_lo > 0.0) ? std::pow(d_lo, alpha) : 0.0;
  if (z_hi <= z_lo) return 0.0;
  auto h = [&](double z) {
    const double d = std::pow(z, 1.0 / alpha);
    const double s = left ? t0 - d : t0 + d;
    return g(s) / alpha;
  };
  // Head near z = 0: g is smooth at the kink, so the head is g(t0∓)·Δz/α.
  double total = 0.0;
  double z_cut = std::max(z_lo, z_hi * 1e-13);
  if (z_cut > z_lo) {
    const double d_cut = std::pow(z_cut, 1.0 / alpha);
    const double s_edge = left ? t0 - 0.5 * d_cut : t0 + 0.5 * d_cut;
    total += g(s_edge) * (z_cut - z_lo) / alpha;
  }
  if (z_hi > z_cut) total += integrate_composite(h, z_cut, z_hi, {}, opt);
  return total;
}

PowerFit fit_power(const std::function<double(double)>& f, double t_lo,
                   double t_hi) {
  PowerFit out;
  constexpr int n = 9;
  std::array<double, n> ts{}, ys{};
  int positives = 0;
  for (int i = 0; i < n; ++i) {
    const double t = t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / (n - 1));
    const double y = f(t);
    ts[i] = t;
    ys[i] = y;
    if (y > 0.0 && std::isfinite(y)) ++positives;
    if (!std::isfinite(y) && y > 0.0) {  // +inf sample: integrand already blown up
      out.exponent = kInf;
      out.reliable = false;
      return out;
    }
    if (y < 0.0) {  // engine integrands are nonnegative; bail out
      out.reliable = false;
      return out;
    }
  }
  if (positives == 0) {
    out.all_zero = true;
    out.reliable = true;
    out.exponent = -kInf;
    return out;
  }
  if (positives < n) {
    out.reliable = false;  // mixed zero / positive: support edge in the window
    return out;
  }
  auto slope = [&](int i0, int i1, double* icpt) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = i1 - i0 + 1;
    for (int i = i0; i <= i1; ++i) {
      const double x = std::log(ts[i]), y = std::log(ys[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double denom = m * sxx - sx * sx;
    const double sl = (m * sxy - sx * sy) / denom;
    if (icpt) *icpt = (sy - sl * sx) / m;
    return sl;
  };
  double icpt = 0.0;
  out.exponent = slope(0, n - 1, &icpt);
  out.coef = std::exp(icpt);
  const double s1 = slope(0, n / 2, nullptr);
  const double s2 = slope(n / 2, n - 1, nullptr);
  out.slope_spread = std::abs(s1 - s2);
  out.reliable = out.slope_spread < 0.25;
  // Super-power decay (e.g. exponentials): slopes steepen fast; still a
  // convergent tail, report the steeper slope.
  if (!out.reliable && s1 < -1.5 && s2 < s1) {
    out.exponent = s2;
    out.reliable = true;
  }
  return out;
}

Integral integrate_improper(const std::function<double(double)>& f,
                            std::vector<double> breaks,
                            const QuadratureOptions& opt) {
  Integral out;
  out.value = integrate_composite(f, opt.t_min, opt.t_max, breaks, opt);

  // Origin classification on the innermost two decades.
  PowerFit lo = fit_power(f, opt.t_min, opt.t_min * 100.0);
  out.diag.origin_exponent = lo.exponent;
  if (lo.all_zero) {
    // nothing below: fine
  } else if (!lo.reliable) {
    out.verdict = Verdict::Indeterminate;
  } else if (lo.exponent <= -1.0 - opt.borderline_band) {
    out.verdict = Verdict::Infinite;
  } else if (lo.exponent < -1.0 + opt.borderline_band) {
    out.verdict = Verdict::Indeterminate;
  } else {
    out.value += f(opt.t_min) * opt.t_min / (lo.exponent + 1.0);
  }

  // Tail classification on the outermost three decades.
  PowerFit hi = fit_power(f, opt.t_max / 1000.0, opt.t_max);
  out.diag.tail_exponent = hi.exponent;
  if (hi.all_zero) {
    // compactly supported: done
  } else if (!hi.reliable) {
    if (out.verdict != Verdict::Infinite) out.verdict = Verdict::Indeterminate;
  } else if (hi.exponent >= -1.0 + opt.borderline_band) {
    out.verdict = Verdict::Infinite;
  } else if (hi.exponent > -1.0 - opt.borderline_band) {
    if (out.verdict != Verdict::Infinite) out.verdict = Verdict::Indeterminate;
  } else {
    out.value += f(opt.t_max) * opt.t_max / (-hi.exponent - 1.0);
  }
  return out;
}

}  // namespace rcone
