#include "rcone/weight.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rcone {

namespace {

double safe_pow(double base, double e) {
  if (e == 0.0) return 1.0;
  return std::pow(base, e);
}

// Intervals of positive measure where a profile vanishes.
std::vector<std::pair<double, double>> zero_intervals(const RadialProfile& u) {
  std::vector<std::pair<double, double>> out;
  if (u.support_lo() > 0.0) out.emplace_back(0.0, u.support_lo());
  if (std::isfinite(u.support_hi())) out.emplace_back(u.support_hi(), kInf);
  if (u.is_step()) {
    const auto& g = u.step_grid();
    const auto& v = u.step_values();
    double lo = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
      if (v[i] == 0.0) out.emplace_back(lo, g[i]);
      lo = g[i];
    }
  }
  return out;
}

}  // namespace

MomentTable::MomentTable(const GroupGeometry& geom, RadialProfile u,
                         double u_exp, double s_power,
                         std::vector<CumFactor> cums, QuadratureOptions opt)
    : geom_(geom),
      u_profile_(std::move(u)),
      u_exp_(u_exp),
      s_power_(s_power),
      cums_(std::move(cums)),
      opt_(opt) {
  build(opt);
}

MomentTable::MomentTable(const GroupGeometry& geom, CallableFactor u,
                         double s_power, std::vector<CumFactor> cums,
                         QuadratureOptions opt)
    : geom_(geom),
      u_callable_(std::move(u)),
      u_exp_(1.0),
      s_power_(s_power),
      cums_(std::move(cums)),
      opt_(opt) {
  build(opt);
}

double MomentTable::base_eval(double s) const {
  const double uv = u_profile_ ? (*u_profile_)(s) : u_callable_->eval(s);
  bool saw_zero = false, saw_inf = false;
  if (uv == 0.0) {
    if (u_exp_ > 0.0) saw_zero = true;
    else if (u_exp_ < 0.0) saw_inf = true;
  } else if (std::isinf(uv)) {
    if (u_exp_ > 0.0) saw_inf = true;
    else if (u_exp_ < 0.0) saw_zero = true;
  }
  double cvals[8];
  const size_t nc = cums_.size();
  for (size_t k = 0; k < nc; ++k) {
    const double wv = cums_[k].ref->ball(s);
    cvals[k] = wv;
    const double e = cums_[k].exponent;
    if (wv == 0.0) {
      if (e > 0.0) saw_zero = true;
      else if (e < 0.0) saw_inf = true;
    } else if (std::isinf(wv)) {
      if (e > 0.0) saw_inf = true;
      else if (e < 0.0) saw_zero = true;
    }
  }
  if (saw_zero) return 0.0;  // measure-theory convention: 0 · ∞ = 0
  if (saw_inf) return kInf;
  double acc = safe_pow(uv, u_exp_) * std::pow(s, s_power_ + geom_.Q() - 1.0);
  for (size_t k = 0; k < nc; ++k) acc *= safe_pow(cvals[k], cums_[k].exponent);
  return acc;
}

void MomentTable::build(QuadratureOptions opt) {
  if (cums_.size() > 8) throw std::invalid_argument("MomentTable: too many cumulative factors");

  // Degenerate pointwise factor.
  if (u_profile_ && u_profile_->is_zero()) {
    if (u_exp_ > 0.0) all_zero_ = true;
    else if (u_exp_ < 0.0) all_inf_ = true;
  }
  // Cumulative factors that are identically 0 or identically +inf.
  for (const CumFactor& c : cums_) {
    const auto& b0 = c.ref->ball_at_zero();
    if (b0.kind == EndBehavior::Kind::AlwaysInf) {
      if (c.exponent < 0.0) all_zero_ = true;
      else if (c.exponent > 0.0) all_inf_ = true;
    }
    if (c.ref->all_zero_) {
      if (c.exponent > 0.0) all_zero_ = true;
      else if (c.exponent < 0.0) all_inf_ = true;
    }
  }
  if (all_zero_) {
    all_inf_ = false;
    ball0_ = ball_inf_ = tail0_ = tail_inf_ =
        EndBehavior{EndBehavior::Kind::Zero, 0.0, 0.0, true};
    positive_from_ = kInf;
    return;
  }
  if (all_inf_) {
    poison_ball_from_ = 0.0;
    poison_tail_upto_ = kInf;
    origin_verdict_ = tail_verdict_ = Verdict::Infinite;
    ball0_ = ball_inf_ = tail0_ = tail_inf_ =
        EndBehavior{EndBehavior::Kind::AlwaysInf, 0.0, 0.0, true};
    return;
  }

  const double u_supp_lo = u_profile_ ? u_profile_->support_lo() : 0.0;
  const double u_supp_hi = u_profile_ ? u_profile_->support_hi() : kInf;

  positive_from_ = u_supp_lo;
  for (const CumFactor& c : cums_)
    if (c.exponent > 0.0)
      positive_from_ = std::max(positive_from_, c.ref->positive_from());

  // Poisoned regions: positive-measure sets where the integrand is +inf.
  std::vector<std::pair<double, double>> bad;
  if (u_profile_ && u_exp_ < 0.0) bad = zero_intervals(*u_profile_);
  for (const CumFactor& c : cums_) {
    if (c.exponent >= 0.0) continue;
    const double z = c.ref->positive_from();
    if (z > 0.0 && u_supp_lo < z)
      bad.emplace_back(std::max(u_supp_lo, 0.0), z);
  }
  for (const auto& iv : bad) {
    poison_ball_from_ = std::min(poison_ball_from_, iv.first);
    poison_tail_upto_ = std::max(poison_tail_upto_, iv.second);
  }

  // Breakpoints.
  std::vector<double> breaks;
  auto add_breaks = [&](const std::vector<double>& bs) {
    for (double b : bs)
      if (b > 0.0 && std::isfinite(b)) breaks.push_back(b);
  };
  if (u_profile_) add_breaks(u_profile_->breakpoints());
  if (u_callable_) add_breaks(u_callable_->breaks);
  for (const CumFactor& c : cums_) add_breaks(c.ref->breakpoints());
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  lo_edge_ = opt.t_min;
  hi_edge_ = opt.t_max;
  if (!breaks.empty()) {
    lo_edge_ = std::min(lo_edge_, 0.5 * breaks.front());
    hi_edge_ = std::max(hi_edge_, 2.0 * breaks.back());
  }

  // Cell edges: breakpoints plus a log grid.
  std::vector<double> edges{lo_edge_, hi_edge_};
  for (double b : breaks)
    if (b > lo_edge_ && b < hi_edge_) edges.push_back(b);
  const int per_decade = opt.cells_per_decade;
  const double decades = std::log10(hi_edge_ / lo_edge_);
  const int n_grid = std::max(1, static_cast<int>(std::ceil(decades * per_decade)));
  for (int i = 1; i < n_grid; ++i)
    edges.push_back(lo_edge_ * std::pow(hi_edge_ / lo_edge_,
                                        static_cast<double>(i) / n_grid));
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](double a, double b) {
                            return std::abs(a - b) <= 1e-13 * std::max(a, b);
                          }),
              edges.end());

  auto cell_exact = [&](double a, double b) -> std::optional<PowerPiece> {
    if (!u_profile_) return std::nullopt;
    auto up = u_profile_->power_piece(a, b);
    if (!up) return std::nullopt;
    if (up->coef == 0.0 && u_exp_ < 0.0) return std::nullopt;  // poisoned cell
    double coef = safe_pow(up->coef, u_exp_);
    double ex = (up->coef == 0.0 ? 0.0 : up->exponent * u_exp_) + s_power_ +
                geom_.Q() - 1.0;
    if (up->coef == 0.0) return PowerPiece{0.0, 0.0};
    for (const CumFactor& c : cums_) {
      auto cp = c.ref->ball_power_on(a, b);
      if (!cp) return std::nullopt;
      if (cp->coef == 0.0) {
        if (c.exponent < 0.0) return std::nullopt;
        if (c.exponent > 0.0) return PowerPiece{0.0, 0.0};
        continue;
      }
      if (std::isinf(cp->coef)) return std::nullopt;
      coef *= safe_pow(cp->coef, c.exponent);
      ex += cp->exponent * c.exponent;
    }
    return PowerPiece{coef, ex};
  };

  cells_.reserve(edges.size());
  for (size_t i = 0; i + 1 < edges.size(); ++i) {
    Cell cell{edges[i], edges[i + 1], 0.0, std::nullopt};
    cell.exact = cell_exact(cell.lo, cell.hi);
    if (cell.exact) {
      cell.value = cell.exact->coef *
                   power_primitive(cell.exact->exponent, cell.lo, cell.hi);
    } else {
      cell.value = integrate_composite([this](double s) { return base_eval(s); },
                                       cell.lo, cell.hi, {}, opt_);
    }
    cells_.push_back(cell);
  }

  // Head: behaviour on (0, lo_edge_).
  const double Qm1 = s_power_ + geom_.Q() - 1.0;
  bool head_exact = false;
  if (positive_from_ >= lo_edge_) {
    head_is_zero_ = true;
    head_total_ = 0.0;
    head_exact = true;
    head_delta_ = lo_edge_;
  } else if (u_profile_) {
    auto up = u_profile_->origin_piece();
    if (up && up->coef == 0.0) {
      head_is_zero_ = true;
      head_total_ = 0.0;
      head_exact = true;
      head_delta_ = u_supp_lo;
    } else if (up) {
      double coef = safe_pow(up->coef, u_exp_);
      double ex = up->exponent * u_exp_ + Qm1;
      double delta = breaks.empty() ? kInf : breaks.front();
      bool ok = true;
      for (const CumFactor& c : cums_) {
        const auto& b0 = c.ref->ball_at_zero();
        if (b0.kind == EndBehavior::Kind::Zero) {
          ok = false;  // factor vanishes near 0 (poison handled above for e<0)
          if (c.exponent > 0.0) {
            head_is_zero_ = true;
            head_total_ = 0.0;
            head_exact = true;
            head_delta_ = c.ref->positive_from();
          }
          break;
        }
        if (b0.kind != EndBehavior::Kind::Power || !b0.exact) {
          ok = false;
          break;
        }
        coef *= safe_pow(b0.coef, c.exponent);
        ex += b0.exponent * c.exponent;
        delta = std::min(delta, c.ref->head_exact_radius());
      }
      if (ok) {
        head_exact = true;
        head_integrand_ = PowerPiece{coef, ex};
        head_delta_ = std::min(delta, lo_edge_);
        if (ex <= -1.0) {
          origin_verdict_ = Verdict::Infinite;
        } else {
          head_total_ = coef * std::pow(lo_edge_, ex + 1.0) / (ex + 1.0);
        }
      }
    }
  }
  if (!head_exact && origin_verdict_ == Verdict::Finite && poison_ball_from_ > 0.0) {
    any_fit_ = true;
    PowerFit f = fit_power([this](double s) { return base_eval(s); }, lo_edge_,
                           lo_edge_ * 100.0);
    fitted_head_exp_ = f.exponent;
    if (f.all_zero) {
      head_is_zero_ = true;
    } else if (!f.reliable) {
      origin_verdict_ = Verdict::Indeterminate;
    } else if (f.exponent <= -1.0 - opt.borderline_band) {
      origin_verdict_ = Verdict::Infinite;
    } else if (f.exponent < -1.0 + opt.borderline_band) {
      origin_verdict_ = Verdict::Indeterminate;
    } else {
      head_total_ = base_eval(lo_edge_) * lo_edge_ / (f.exponent + 1.0);
    }
  }

  // Tail: behaviour on (hi_edge_, ∞).
  bool tail_exact = false;
  if (u_profile_ && std::isfinite(u_supp_hi) && u_exp_ > 0.0) {
    tail_is_zero_ = true;
    tail_exact = true;
    beyond_total_ = 0.0;
  } else if (u_profile_) {
    auto tp = u_profile_->tail_piece();
    if (tp && tp->coef == 0.0 && u_exp_ >= 0.0) {
      tail_is_zero_ = true;
      tail_exact = true;
    } else if (tp) {
      double coef = safe_pow(tp->coef, u_exp_);
      double ex = tp->exponent * u_exp_ + Qm1;
      bool ok = true, logs = false;
      for (const CumFactor& c : cums_) {
        const auto& bi = c.ref->ball_at_inf();
        switch (bi.kind) {
          case EndBehavior::Kind::Const:
            coef *= safe_pow(bi.coef, c.exponent);
            if (!bi.exact) ok = false;
            break;
          case EndBehavior::Kind::Power:
            if (!bi.exact) { ok = false; break; }
            coef *= safe_pow(bi.coef, c.exponent);
            ex += bi.exponent * c.exponent;
            break;
          case EndBehavior::Kind::LogGrowth:
            logs = true;
            ok = false;
            break;
          default:
            ok = false;
        }
        if (!ok && !logs) break;
      }
      if (ok) {
        tail_exact = true;
        tail_integrand_ = PowerPiece{coef, ex};
        tail_from_ = breaks.empty() ? 0.0 : breaks.back();
        // Exactness of the closed form additionally needs globally-exact
        // power cumulatives; composite Const factors are only asymptotic.
        for (const CumFactor& c : cums_)
          if (!(c.ref->global_power_ball() ||
                c.ref->ball_at_inf().kind == EndBehavior::Kind::Const))
            tail_from_ = kInf;
        if (ex >= -1.0) {
          tail_verdict_ = Verdict::Infinite;
        }
      }
    }
  }
  if (!tail_exact && tail_verdict_ == Verdict::Finite) {
    any_fit_ = true;
    PowerFit f = fit_power([this](double s) { return base_eval(s); },
                           hi_edge_ / 1000.0, hi_edge_);
    fitted_tail_exp_ = f.exponent;
    if (f.all_zero) {
      tail_is_zero_ = true;
    } else if (!f.reliable) {
      tail_verdict_ = Verdict::Indeterminate;
    } else if (f.exponent >= -1.0 + opt.borderline_band) {
      tail_verdict_ = Verdict::Infinite;
    } else if (f.exponent > -1.0 - opt.borderline_band) {
      tail_verdict_ = Verdict::Indeterminate;
    }
  }
  if (std::isfinite(poison_tail_upto_) == false) tail_verdict_ = Verdict::Infinite;

  if (tail_verdict_ == Verdict::Finite && !tail_is_zero_) {
    beyond_total_ = beyond_value(hi_edge_, kInf);
  }

  // Prefix / suffix sums over the cells.
  prefix_.assign(cells_.size() + 1, 0.0);
  for (size_t i = 0; i < cells_.size(); ++i)
    prefix_[i + 1] = prefix_[i] + cells_[i].value;
  suffix_.assign(cells_.size() + 1, 0.0);
  for (size_t i = cells_.size(); i-- > 0;)
    suffix_[i] = suffix_[i + 1] + cells_[i].value;

  // Global exact power ball.
  if (u_profile_ && head_integrand_ && breaks.empty()) {
    bool cums_global = true;
    for (const CumFactor& c : cums_)
      if (!c.ref->global_power_ball()) cums_global = false;
    if (cums_global && origin_verdict_ == Verdict::Finite) {
      const double ex = head_integrand_->exponent;
      global_ball_ = PowerPiece{geom_.sigmaS() * head_integrand_->coef / (ex + 1.0),
                                ex + 1.0};
    }
  }

  // End behaviours (public units: sigmaS folded into coefficients).
  const double sigma = geom_.sigmaS();
  const bool poisoned = poison_ball_from_ < kInf;

  if (origin_verdict_ == Verdict::Infinite || poison_ball_from_ <= 0.0) {
    ball0_ = {EndBehavior::Kind::AlwaysInf, 0.0, 0.0, head_exact};
  } else if (head_is_zero_) {
    ball0_ = {EndBehavior::Kind::Zero, 0.0, 0.0, true};
  } else if (head_integrand_) {
    const double ex = head_integrand_->exponent;
    ball0_ = {EndBehavior::Kind::Power, ex + 1.0,
              sigma * head_integrand_->coef / (ex + 1.0), true};
  } else if (origin_verdict_ == Verdict::Indeterminate) {
    ball0_ = {EndBehavior::Kind::Unknown, fitted_head_exp_ + 1.0, 0.0, false};
  } else {
    ball0_ = {EndBehavior::Kind::Power, fitted_head_exp_ + 1.0,
              sigma * head_total_ / std::pow(lo_edge_, fitted_head_exp_ + 1.0),
              false};
  }

  if (ball0_.kind == EndBehavior::Kind::AlwaysInf || poisoned) {
    ball_inf_ = {EndBehavior::Kind::AlwaysInf, 0.0, 0.0, true};
  } else if (tail_verdict_ == Verdict::Infinite) {
    if (tail_integrand_) {
      const double ex = tail_integrand_->exponent;
      if (ex == -1.0) {
        ball_inf_ = {EndBehavior::Kind::LogGrowth, 0.0, sigma * tail_integrand_->coef, true};
      } else {
        ball_inf_ = {EndBehavior::Kind::Power, ex + 1.0,
                     sigma * tail_integrand_->coef / (ex + 1.0), true};
      }
    } else {
      const double ex = fitted_tail_exp_;
      ball_inf_ = {EndBehavior::Kind::Power, std::max(ex + 1.0, 0.0), 0.0, false};
    }
  } else if (tail_verdict_ == Verdict::Indeterminate) {
    ball_inf_ = {EndBehavior::Kind::Unknown, 0.0, 0.0, false};
  } else {
    const double tot = sigma * (head_total_ + prefix_.back() + beyond_total_);
    ball_inf_ = {EndBehavior::Kind::Const, 0.0, tot, !any_fit_};
  }

  if (tail_verdict_ == Verdict::Infinite || poison_tail_upto_ > 0.0) {
    tail0_ = {EndBehavior::Kind::AlwaysInf, 0.0, 0.0, true};
  } else if (origin_verdict_ == Verdict::Infinite) {
    if (head_integrand_) {
      const double ex = head_integrand_->exponent;
      if (ex == -1.0) {
        tail0_ = {EndBehavior::Kind::LogGrowth, 0.0, sigma * head_integrand_->coef, true};
      } else {
        tail0_ = {EndBehavior::Kind::Power, ex + 1.0,
                  sigma * head_integrand_->coef / (-ex - 1.0), true};
      }
    } else {
      tail0_ = {EndBehavior::Kind::Power, std::min(fitted_head_exp_ + 1.0, 0.0), 0.0, false};
    }
  } else if (origin_verdict_ == Verdict::Indeterminate ||
             tail_verdict_ == Verdict::Indeterminate) {
    tail0_ = {EndBehavior::Kind::Unknown, 0.0, 0.0, false};
  } else {
    const double tot = sigma * (head_total_ + prefix_.back() + beyond_total_);
    if (tot == 0.0) {
      tail0_ = {EndBehavior::Kind::Zero, 0.0, 0.0, true};
    } else {
      tail0_ = {EndBehavior::Kind::Const, 0.0, tot, !any_fit_};
    }
  }

  if (tail_verdict_ == Verdict::Infinite || !std::isfinite(poison_tail_upto_)) {
    tail_inf_ = {EndBehavior::Kind::AlwaysInf, 0.0, 0.0, true};
  } else if (tail_is_zero_) {
    tail_inf_ = {EndBehavior::Kind::Zero, 0.0, 0.0, true};
  } else if (tail_integrand_) {
    const double ex = tail_integrand_->exponent;
    tail_inf_ = {EndBehavior::Kind::Power, ex + 1.0,
                 sigma * tail_integrand_->coef / (-ex - 1.0), true};
  } else if (tail_verdict_ == Verdict::Indeterminate) {
    tail_inf_ = {EndBehavior::Kind::Unknown, 0.0, 0.0, false};
  } else {
    tail_inf_ = {EndBehavior::Kind::Power, fitted_tail_exp_ + 1.0, 0.0, false};
  }
}

double MomentTable::head_value(double t) const {
  if (head_is_zero_ || t <= positive_from_) return 0.0;
  if (head_integrand_) {
    const double ex = head_integrand_->exponent;
    return head_integrand_->coef * std::pow(t, ex + 1.0) / (ex + 1.0);
  }
  return head_total_ * std::pow(t / lo_edge_, fitted_head_exp_ + 1.0);
}

double MomentTable::beyond_value(double from, double to) const {
  if (tail_is_zero_) return 0.0;
  if (std::isinf(to)) {
    if (tail_integrand_ && from >= tail_from_) {
      const double ex = tail_integrand_->exponent;
      return tail_integrand_->coef * std::pow(from, ex + 1.0) / (-ex - 1.0);
    }
    const double t_ext = 100.0 * std::max(from, hi_edge_);
    double acc = from < t_ext
                     ? integrate_composite([this](double s) { return base_eval(s); },
                                           from, t_ext, {}, opt_)
                     : 0.0;
    double ex = tail_integrand_ ? tail_integrand_->exponent : fitted_tail_exp_;
    const double edge = base_eval(t_ext);
    if (edge > 0.0 && ex < -1.0) acc += edge * t_ext / (-ex - 1.0);
    return acc;
  }
  if (to <= from) return 0.0;
  if (tail_integrand_ && from >= tail_from_) {
    return tail_integrand_->coef * power_primitive(tail_integrand_->exponent, from, to);
  }
  return integrate_composite([this](double s) { return base_eval(s); }, from, to,
                             {}, opt_);
}

double MomentTable::cell_partial(size_t idx, double from, double to) const {
  const Cell& c = cells_[idx];
  if (to <= from) return 0.0;
  if (c.exact) return c.exact->coef * power_primitive(c.exact->exponent, from, to);
  return integrate_composite([this](double s) { return base_eval(s); }, from, to,
                             {}, opt_);
}

double MomentTable::ball(double t) const {
  if (all_zero_ || t <= 0.0) return 0.0;
  if (all_inf_) return kInf;
  if (origin_verdict_ == Verdict::Infinite) return kInf;
  if (t > poison_ball_from_) return kInf;
  const double sigma = geom_.sigmaS();
  if (t <= lo_edge_) return sigma * head_value(t);
  if (t >= hi_edge_) {
    double v = head_total_ + prefix_.back();
    v += beyond_value(hi_edge_, t);
    return sigma * v;
  }
  const auto it = std::upper_bound(
      cells_.begin(), cells_.end(), t,
      [](double x, const Cell& c) { return x < c.hi; });
  const size_t i = static_cast<size_t>(it - cells_.begin());
  double v = head_total_ + prefix_[i] + cell_partial(i, cells_[i].lo, t);
  return std::max(0.0, sigma * v);
}

double MomentTable::tail(double t) const {
  if (all_zero_) return 0.0;
  if (all_inf_) return kInf;
  if (tail_verdict_ == Verdict::Infinite) return kInf;
  if (t < poison_tail_upto_) return kInf;
  const double sigma = geom_.sigmaS();
  if (t <= 0.0) {
    Integral tot = total();
    return tot.finite() ? tot.value : kInf;
  }
  if (t >= hi_edge_) return sigma * beyond_value(t, kInf);
  if (t <= lo_edge_) {
    double v = (head_total_ - head_value(t)) + suffix_.front() + beyond_total_;
    return std::max(0.0, sigma * v);
  }
  const auto it = std::upper_bound(
      cells_.begin(), cells_.end(), t,
      [](double x, const Cell& c) { return x < c.hi; });
  const size_t i = static_cast<size_t>(it - cells_.begin());
  double v = cell_partial(i, t, cells_[i].hi) + suffix_[i + 1] + beyond_total_;
  return std::max(0.0, sigma * v);
}

Integral MomentTable::total() const {
  Integral out;
  out.diag.origin_exponent = head_integrand_ ? head_integrand_->exponent : fitted_head_exp_;
  out.diag.tail_exponent = tail_integrand_ ? tail_integrand_->exponent : fitted_tail_exp_;
  out.diag.origin_exact = head_integrand_.has_value() || head_is_zero_;
  out.diag.tail_exact = tail_integrand_.has_value() || tail_is_zero_;
  if (all_zero_) return out;
  if (all_inf_ || poison_ball_from_ < kInf) {
    out.verdict = Verdict::Infinite;
    return out;
  }
  if (origin_verdict_ != Verdict::Finite || tail_verdict_ != Verdict::Finite) {
    out.verdict = origin_verdict_ == Verdict::Infinite ||
                          tail_verdict_ == Verdict::Infinite
                      ? Verdict::Infinite
                      : Verdict::Indeterminate;
  }
  out.value = geom_.sigmaS() * (head_total_ + prefix_.back() + beyond_total_);
  return out;
}

std::optional<PowerPiece> MomentTable::head_power() const {
  if (!head_integrand_) return std::nullopt;
  const double ex = head_integrand_->exponent;
  if (ex <= -1.0) return std::nullopt;
  return PowerPiece{geom_.sigmaS() * head_integrand_->coef / (ex + 1.0), ex + 1.0};
}

std::optional<PowerPiece> MomentTable::ball_power_on(double a, double b) const {
  if (all_zero_) return PowerPiece{0.0, 0.0};
  if (global_ball_) return global_ball_;
  const double ba = ball(a);
  if (std::isinf(ba)) return std::nullopt;
  if (ba == ball(b)) return PowerPiece{ba, 0.0};
  if (b <= head_delta_ && head_integrand_) return head_power();
  return std::nullopt;
}

std::vector<double> MomentTable::breakpoints() const {
  std::vector<double> out;
  if (u_profile_) out = u_profile_->breakpoints();
  if (u_callable_) out = u_callable_->breaks;
  for (const CumFactor& c : cums_) {
    auto bs = c.ref->breakpoints();
    out.insert(out.end(), bs.begin(), bs.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

RadialWeight::RadialWeight(const GroupGeometry& geom, RadialProfile profile,
                           QuadratureOptions opt)
    : geom_(geom), profile_(std::move(profile)) {
  if (profile_.is_zero())
    throw std::invalid_argument("RadialWeight: identically zero profile");
  mass_ = std::make_shared<MomentTable>(geom_, profile_, 1.0, 0.0,
                                        std::vector<CumFactor>{}, opt);
}

bool RadialWeight::origin_divergent() const {
  return mass_->ball_at_zero().kind == EndBehavior::Kind::AlwaysInf;
}

bool RadialWeight::positive_on_probes() const {
  for (int i = 0; i < 512; ++i) {
    const double t = 1e-6 * std::pow(1e12, i / 511.0);
    if (!(profile_(t) > 0.0)) return false;
  }
  return true;
}

Integral total_mass(const RadialWeight& w) { return w.total_mass(); }

ProductWeight::ProductWeight(RadialWeight w1, RadialWeight w2)
    : geom_{w1.geometry(), w2.geometry()}, w1_(std::move(w1)), w2_(std::move(w2)) {}

ProductWeight::ProductWeight(const ProductGeometry& geom, BiRadialSurface surface,
                             QuadratureOptions opt)
    : geom_(geom), surface_(std::move(surface)) {
  mass_ = std::make_shared<BiMomentTable>(geom_, *surface_, 1.0, 0.0, 0.0, opt);
}

const RadialWeight& ProductWeight::factor1() const {
  if (!w1_) throw std::logic_error("ProductWeight: not in product form");
  return *w1_;
}

const RadialWeight& ProductWeight::factor2() const {
  if (!w2_) throw std::logic_error("ProductWeight: not in product form");
  return *w2_;
}

const BiRadialSurface& ProductWeight::surface() const {
  if (!surface_) throw std::logic_error("ProductWeight: not in bi-radial form");
  return *surface_;
}

double ProductWeight::operator()(double t, double tau) const {
  if (is_product()) return (*w1_)(t) * (*w2_)(tau);
  return (*surface_)(t, tau);
}

double ProductWeight::cumulative(double t, double tau) const {
  if (is_product()) return w1_->cumulative(t) * w2_->cumulative(tau);
  return mass_->rect(RegionKind::BallBall, t, tau);
}

BiMomentTable::BiMomentTable(const ProductGeometry& geom, BiRadialSurface u,
                             double u_exp, double g1, double g2,
                             QuadratureOptions opt)
    : geom_(geom), u_exp_(u_exp), g1_(g1), g2_(g2) {
  if (u.is_separable()) {
    separable_ = true;
    m1_ = std::make_shared<MomentTable>(geom.g1, u.factor1(), u_exp, g1,
                                        std::vector<CumFactor>{}, opt);
    m2_ = std::make_shared<MomentTable>(geom.g2, u.factor2(), u_exp, g2,
                                        std::vector<CumFactor>{}, opt);
    a1_zero_ = m1_->ball_at_zero();
    a1_inf_ = m1_->ball_at_inf();
    a2_zero_ = m2_->ball_at_zero();
    a2_inf_ = m2_->ball_at_inf();
    return;
  }
  separable_ = false;
  surface_ = std::move(u);
  const auto& grid1 = surface_.grid1();
  const auto& grid2 = surface_.grid2();
  const auto& raw = surface_.values();
  const size_t m = grid1.size(), k = grid2.size();
  amass_.resize(m);
  bmass_.resize(k);
  const double e1 = g1_ + geom_.g1.Q() - 1.0;
  const double e2 = g2_ + geom_.g2.Q() - 1.0;
  axis1_origin_divergent_ = e1 <= -1.0;
  axis2_origin_divergent_ = e2 <= -1.0;
  double lo = 0.0;
  for (size_t i = 0; i < m; ++i) {
    amass_[i] = geom_.g1.sigmaS() *
                (axis1_origin_divergent_ && lo == 0.0
                     ? kInf
                     : power_primitive(e1, lo == 0.0 ? 0.0 : lo, grid1[i]));
    if (lo == 0.0 && !axis1_origin_divergent_)
      amass_[i] = geom_.g1.sigmaS() * std::pow(grid1[i], e1 + 1.0) / (e1 + 1.0);
    lo = grid1[i];
  }
  lo = 0.0;
  for (size_t j = 0; j < k; ++j) {
    bmass_[j] = geom_.g2.sigmaS() *
                (axis2_origin_divergent_ && lo == 0.0
                     ? kInf
                     : power_primitive(e2, lo == 0.0 ? 0.0 : lo, grid2[j]));
    if (lo == 0.0 && !axis2_origin_divergent_)
      bmass_[j] = geom_.g2.sigmaS() * std::pow(grid2[j], e2 + 1.0) / (e2 + 1.0);
    lo = grid2[j];
  }
  vals_.resize(m * k);
  zero_pref_.assign((m + 1) * (k + 1), 0);
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < k; ++j) {
      const double v = raw[i * k + j];
      vals_[i * k + j] = safe_pow(v, u_exp_);
      if (v == 0.0) has_zero_cell_ = true;
      zero_pref_[(i + 1) * (k + 1) + (j + 1)] = (v == 0.0 ? 1 : 0);
    }
  for (size_t i = 1; i <= m; ++i)
    for (size_t j = 1; j <= k; ++j)
      zero_pref_[i * (k + 1) + j] += zero_pref_[(i - 1) * (k + 1) + j] +
                                     zero_pref_[i * (k + 1) + (j - 1)] -
                                     zero_pref_[(i - 1) * (k + 1) + (j - 1)];
  pref_.assign((m + 1) * (k + 1), 0.0);
  for (size_t i = 1; i <= m; ++i)
    for (size_t j = 1; j <= k; ++j)
      pref_[i * (k + 1) + j] = vals_[(i - 1) * k + (j - 1)] * amass_[i - 1] *
                                   bmass_[j - 1] +
                               pref_[(i - 1) * (k + 1) + j] +
                               pref_[i * (k + 1) + (j - 1)] -
                               pref_[(i - 1) * (k + 1) + (j - 1)];

  auto mk_end = [&](bool origin_div, double expo, bool zero_first) {
    EndBehavior e;
    if (u_exp_ < 0.0) {
      e = {EndBehavior::Kind::AlwaysInf, 0.0, 0.0, true};
    } else if (origin_div) {
      e = {EndBehavior::Kind::AlwaysInf, 0.0, 0.0, true};
    } else if (zero_first) {
      e = {EndBehavior::Kind::Zero, 0.0, 0.0, true};
    } else {
      e = {EndBehavior::Kind::Power, expo, 0.0, true};
    }
    return e;
  };
  bool first_row_zero = true, first_col_zero = true;
  for (size_t j = 0; j < k; ++j)
    if (raw[j] != 0.0) first_row_zero = false;
  for (size_t i = 0; i < m; ++i)
    if (raw[i * k] != 0.0) first_col_zero = false;
  a1_zero_ = mk_end(axis1_origin_divergent_, e1 + 1.0, first_row_zero);
  a2_zero_ = mk_end(axis2_origin_divergent_, e2 + 1.0, first_col_zero);
  if (u_exp_ < 0.0) {
    a1_inf_ = a2_inf_ = {EndBehavior::Kind::AlwaysInf, 0.0, 0.0, true};
  } else {
    a1_inf_ = {EndBehavior::Kind::Const, 0.0,
               pref_[m * (k + 1) + k], true};
    a2_inf_ = a1_inf_;
  }
}

double BiMomentTable::tensor_bb(double t, double tau) const {
  const auto& grid1 = surface_.grid1();
  const auto& grid2 = surface_.grid2();
  const size_t m = grid1.size(), k = grid2.size();
  if (u_exp_ < 0.0 && (t > grid1.back() || tau > grid2.back())) return kInf;
  const double tc = std::min(t, grid1.back());
  const double tauc = std::min(tau, grid2.back());
  const size_t i = static_cast<size_t>(
      std::upper_bound(grid1.begin(), grid1.end(), tc) - grid1.begin());
  const size_t j = static_cast<size_t>(
      std::upper_bound(grid2.begin(), grid2.end(), tauc) - grid2.begin());
  const size_t ifull = std::min(i, m), jfull = std::min(j, k);
  if (u_exp_ < 0.0) {
    // any zero cell inside the rectangle poisons it
    const size_t ic = std::min(ifull + 1, m), jc = std::min(jfull + 1, k);
    if (zero_pref_[ic * (k + 1) + jc] > 0) return kInf;
  }
  if ((axis1_origin_divergent_ || axis2_origin_divergent_) && u_exp_ >= 0.0) {
    // blows up only if a positive first-row/column cell is inside
    return kInf;  // conservative: configs with divergent corner moments
  }
  double acc = pref_[ifull * (k + 1) + jfull];
  const double e1 = g1_ + geom_.g1.Q() - 1.0;
  const double e2 = g2_ + geom_.g2.Q() - 1.0;
  double pa = 0.0, pb = 0.0;
  if (ifull < m && tc > (ifull == 0 ? 0.0 : grid1[ifull - 1])) {
    const double cl = ifull == 0 ? 0.0 : grid1[ifull - 1];
    pa = geom_.g1.sigmaS() *
         (cl == 0.0 ? std::pow(tc, e1 + 1.0) / (e1 + 1.0)
                    : power_primitive(e1, cl, tc));
  }
  if (jfull < k && tauc > (jfull == 0 ? 0.0 : grid2[jfull - 1])) {
    const double cl = jfull == 0 ? 0.0 : grid2[jfull - 1];
    pb = geom_.g2.sigmaS() *
         (cl == 0.0 ? std::pow(tauc, e2 + 1.0) / (e2 + 1.0)
                    : power_primitive(e2, cl, tauc));
  }
  if (pa > 0.0 && ifull < m) {
    double row = 0.0;
    for (size_t j2 = 0; j2 < jfull; ++j2) row += vals_[ifull * k + j2] * bmass_[j2];
    acc += pa * row;
  }
  if (pb > 0.0 && jfull < k) {
    double col = 0.0;
    for (size_t i2 = 0; i2 < ifull; ++i2) col += vals_[i2 * k + jfull] * amass_[i2];
    acc += pb * col;
  }
  if (pa > 0.0 && pb > 0.0 && ifull < m && jfull < k)
    acc += pa * pb * vals_[ifull * k + jfull];
  return acc;
}

double BiMomentTable::rect(RegionKind kind, double t, double tau) const {
  if (separable_) {
    const bool tail1 = kind == RegionKind::TailBall || kind == RegionKind::TailTail;
    const bool tail2 = kind == RegionKind::BallTail || kind == RegionKind::TailTail;
    const double a = tail1 ? m1_->tail(t) : m1_->ball(t);
    const double b = tail2 ? m2_->tail(tau) : m2_->ball(tau);
    if (a == 0.0 || b == 0.0) return 0.0;
    return a * b;
  }
  if (u_exp_ < 0.0 && kind != RegionKind::BallBall) return kInf;
  const double total = pref_.back();
  switch (kind) {
    case RegionKind::BallBall:
      return tensor_bb(t, tau);
    case RegionKind::BallTail:
      return std::max(0.0, tensor_bb(t, kInf) - tensor_bb(t, tau));
    case RegionKind::TailBall:
      return std::max(0.0, tensor_bb(kInf, tau) - tensor_bb(t, tau));
    case RegionKind::TailTail:
      return std::max(0.0, total - tensor_bb(t, kInf) - tensor_bb(kInf, tau) +
                               tensor_bb(t, tau));
  }
  return 0.0;
}

std::vector<double> BiMomentTable::breakpoints1() const {
  if (separable_) return m1_->breakpoints();
  return surface_.grid1();
}

std::vector<double> BiMomentTable::breakpoints2() const {
  if (separable_) return m2_->breakpoints();
  return surface_.grid2();
}

}  // namespace rcone
