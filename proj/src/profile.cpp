#include "rcone/profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rcone {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

RadialProfile RadialProfile::power(double coef, double exponent) {
  require(coef >= 0.0, "power: negative coefficient");
  RadialProfile p;
  p.family_ = Family::Power;
  p.coef_ = coef;
  p.exponent_ = exponent;
  return p;
}

RadialProfile RadialProfile::power_band(double coef, double exponent, double lo,
                                        double hi) {
  require(coef >= 0.0, "power_band: negative coefficient");
  require(lo >= 0.0 && hi > lo, "power_band: bad band");
  RadialProfile p;
  p.family_ = Family::PowerBand;
  p.coef_ = coef;
  p.exponent_ = exponent;
  p.lo_ = lo;
  p.hi_ = hi;
  p.support_lo_ = lo;
  p.support_hi_ = hi;
  if (lo > 0.0) p.breaks_.push_back(lo);
  if (std::isfinite(hi)) p.breaks_.push_back(hi);
  return p;
}

RadialProfile RadialProfile::indicator(double radius, double height) {
  require(radius > 0.0, "indicator: radius must be positive");
  require(height >= 0.0, "indicator: negative height");
  RadialProfile p;
  p.family_ = Family::Indicator;
  p.height_ = height;
  p.hi_ = radius;
  p.support_hi_ = radius;
  p.breaks_.push_back(radius);
  return p;
}

RadialProfile RadialProfile::truncated_power(double coef, double gamma,
                                             double height, double rmax) {
  require(coef > 0.0 && gamma > 0.0 && height > 0.0 && rmax > 0.0,
          "truncated_power: parameters must be positive");
  RadialProfile p;
  p.family_ = Family::TruncatedPower;
  p.coef_ = coef;
  p.exponent_ = -gamma;
  p.height_ = height;
  p.hi_ = rmax;
  p.support_hi_ = rmax;
  p.switch_radius_ = std::pow(coef / height, 1.0 / gamma);
  if (p.switch_radius_ > 0.0 && p.switch_radius_ < rmax)
    p.breaks_.push_back(p.switch_radius_);
  p.breaks_.push_back(rmax);
  std::sort(p.breaks_.begin(), p.breaks_.end());
  return p;
}

RadialProfile RadialProfile::exponential(double coef, double rate) {
  require(coef >= 0.0, "exponential: negative coefficient");
  require(rate > 0.0, "exponential: rate must be positive");
  RadialProfile p;
  p.family_ = Family::Exponential;
  p.coef_ = coef;
  p.rate_ = rate;
  return p;
}

RadialProfile RadialProfile::shifted_power(double coef, double exponent,
                                           double shift) {
  require(coef >= 0.0, "shifted_power: negative coefficient");
  require(shift > 0.0, "shifted_power: shift must be positive");
  RadialProfile p;
  p.family_ = Family::ShiftedPower;
  p.coef_ = coef;
  p.exponent_ = exponent;
  p.shift_ = shift;
  return p;
}

RadialProfile RadialProfile::step(std::vector<double> grid,
                                  std::vector<double> values) {
  require(!grid.empty() && grid.size() == values.size(),
          "step: grid/values size mismatch");
  require(grid.front() > 0.0, "step: radii must be positive");
  for (size_t i = 0; i + 1 < grid.size(); ++i)
    require(grid[i] < grid[i + 1], "step: grid must be strictly increasing");
  for (double v : values) require(v >= 0.0, "step: negative value");
  RadialProfile p;
  p.family_ = Family::Step;
  p.grid_ = std::move(grid);
  p.values_ = std::move(values);
  p.support_hi_ = p.grid_.back();
  p.breaks_ = p.grid_;
  return p;
}

double RadialProfile::operator()(double t) const {
  if (!(t > 0.0)) return family_ == Family::Step || support_lo_ > 0.0
                             ? 0.0
                             : (*this)(std::numeric_limits<double>::min());
  switch (family_) {
    case Family::Power:
      return coef_ * std::pow(t, exponent_);
    case Family::PowerBand:
      return (t >= lo_ && t < hi_) ? coef_ * std::pow(t, exponent_) : 0.0;
    case Family::Indicator:
      return t < hi_ ? height_ : 0.0;
    case Family::TruncatedPower:
      if (t >= hi_) return 0.0;
      return t <= switch_radius_ ? height_ : coef_ * std::pow(t, exponent_);
    case Family::Exponential:
      return coef_ * std::exp(-rate_ * t);
    case Family::ShiftedPower:
      return coef_ * std::pow(shift_ + t, exponent_);
    case Family::Step: {
      auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
      if (it == grid_.end()) return 0.0;
      return values_[static_cast<size_t>(it - grid_.begin())];
    }
  }
  return 0.0;
}

std::optional<PowerPiece> RadialProfile::power_piece(double a, double b) const {
  if (b <= a) return std::nullopt;
  switch (family_) {
    case Family::Power:
      return PowerPiece{coef_, exponent_};
    case Family::PowerBand:
      if (a >= lo_ && b <= hi_) return PowerPiece{coef_, exponent_};
      if (b <= lo_ || a >= hi_) return PowerPiece{0.0, 0.0};
      return std::nullopt;
    case Family::Indicator:
      if (b <= hi_) return PowerPiece{height_, 0.0};
      if (a >= hi_) return PowerPiece{0.0, 0.0};
      return std::nullopt;
    case Family::TruncatedPower:
      if (a >= hi_) return PowerPiece{0.0, 0.0};
      if (b <= std::min(switch_radius_, hi_)) return PowerPiece{height_, 0.0};
      if (a >= switch_radius_ && b <= hi_) return PowerPiece{coef_, exponent_};
      return std::nullopt;
    case Family::Exponential:
    case Family::ShiftedPower:
      return std::nullopt;
    case Family::Step: {
      auto it = std::upper_bound(grid_.begin(), grid_.end(), a);
      if (it == grid_.end()) return PowerPiece{0.0, 0.0};
      const size_t idx = static_cast<size_t>(it - grid_.begin());
      if (b <= grid_[idx] + 1e-300 && (idx == 0 || a >= grid_[idx - 1]))
        return PowerPiece{values_[idx], 0.0};
      // off-by-epsilon cell boundaries: accept when [a,b] sits inside cell idx
      const double cell_lo = idx == 0 ? 0.0 : grid_[idx - 1];
      if (a >= cell_lo && b <= grid_[idx]) return PowerPiece{values_[idx], 0.0};
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<PowerPiece> RadialProfile::origin_piece() const {
  switch (family_) {
    case Family::Power:
      return PowerPiece{coef_, exponent_};
    case Family::PowerBand:
      if (lo_ > 0.0) return PowerPiece{0.0, 0.0};
      return PowerPiece{coef_, exponent_};
    case Family::Indicator:
      return PowerPiece{height_, 0.0};
    case Family::TruncatedPower:
      if (switch_radius_ > 0.0) return PowerPiece{height_, 0.0};
      return PowerPiece{coef_, exponent_};
    case Family::Exponential:
    case Family::ShiftedPower:
      return std::nullopt;  // regular but not an exact power
    case Family::Step:
      return PowerPiece{values_.front(), 0.0};
  }
  return std::nullopt;
}

std::optional<PowerPiece> RadialProfile::tail_piece() const {
  switch (family_) {
    case Family::Power:
      return PowerPiece{coef_, exponent_};
    case Family::PowerBand:
      if (std::isfinite(hi_)) return PowerPiece{0.0, 0.0};
      return PowerPiece{coef_, exponent_};
    case Family::Indicator:
    case Family::TruncatedPower:
    case Family::Step:
      return PowerPiece{0.0, 0.0};
    case Family::Exponential:
      return std::nullopt;  // super-power decay, classified by fit
    case Family::ShiftedPower:
      return std::nullopt;
  }
  return std::nullopt;
}

bool RadialProfile::is_zero() const {
  switch (family_) {
    case Family::Power:
    case Family::PowerBand:
    case Family::Exponential:
    case Family::ShiftedPower:
      return coef_ == 0.0;
    case Family::Indicator:
    case Family::TruncatedPower:
      return height_ == 0.0;
    case Family::Step:
      return std::all_of(values_.begin(), values_.end(),
                         [](double v) { return v == 0.0; });
  }
  return false;
}

const std::vector<double>& RadialProfile::step_grid() const {
  if (family_ != Family::Step) throw std::logic_error("not a step profile");
  return grid_;
}

const std::vector<double>& RadialProfile::step_values() const {
  if (family_ != Family::Step) throw std::logic_error("not a step profile");
  return values_;
}

std::string RadialProfile::family_name() const {
  switch (family_) {
    case Family::Power: return "power";
    case Family::PowerBand: return "power_band";
    case Family::Indicator: return "indicator";
    case Family::TruncatedPower: return "truncated_power";
    case Family::Exponential: return "exponential";
    case Family::ShiftedPower: return "shifted_power";
    case Family::Step: return "step";
  }
  return "?";
}

DecreasingProfile::DecreasingProfile(RadialProfile p) : profile_(std::move(p)) {
  if (profile_.is_step()) {
    const auto& v = profile_.step_values();
    for (size_t i = 0; i + 1 < v.size(); ++i)
      if (v[i] < v[i + 1])
        throw std::invalid_argument("DecreasingProfile: step values increase");
    return;
  }
  double prev = kInf;
  for (int i = 0; i < 512; ++i) {
    const double t = 1e-6 * std::pow(1e12, i / 511.0);
    const double val = profile_(t);
    if (val > prev * (1.0 + 1e-12) + 1e-300)
      throw std::invalid_argument("DecreasingProfile: profile increases");
    if (std::isfinite(val)) prev = val;
  }
}

DecreasingProfile project_to_decreasing(const GroupGeometry& geom,
                                        const RadialProfile& step_profile) {
  if (!step_profile.is_step())
    throw std::invalid_argument("project_to_decreasing: step profile required");
  const auto& grid = step_profile.step_grid();
  const auto& vals = step_profile.step_values();
  const size_t n = vals.size();
  std::vector<double> weight(n);
  double prev_t = 0.0;
  for (size_t i = 0; i < n; ++i) {
    weight[i] = geom.sigmaS() *
                (std::pow(grid[i], geom.Q()) - std::pow(prev_t, geom.Q())) /
                geom.Q();
    prev_t = grid[i];
  }
  // Pool adjacent violators for a nonincreasing fit.
  struct Block {
    double sum, w;
    size_t count;
    double mean() const { return sum / w; }
  };
  std::vector<Block> blocks;
  for (size_t i = 0; i < n; ++i) {
    blocks.push_back({vals[i] * weight[i], weight[i], 1});
    while (blocks.size() >= 2 &&
           blocks[blocks.size() - 2].mean() < blocks.back().mean()) {
      Block b = blocks.back();
      blocks.pop_back();
      blocks.back().sum += b.sum;
      blocks.back().w += b.w;
      blocks.back().count += b.count;
    }
  }
  std::vector<double> out;
  out.reserve(n);
  for (const Block& b : blocks)
    out.insert(out.end(), b.count, std::max(b.mean(), 0.0));
  return DecreasingProfile(RadialProfile::step(grid, std::move(out)));
}

BiRadialSurface BiRadialSurface::separable(RadialProfile a, RadialProfile b) {
  BiRadialSurface s;
  s.separable_ = true;
  s.f1_ = std::move(a);
  s.f2_ = std::move(b);
  return s;
}

BiRadialSurface BiRadialSurface::tensor(std::vector<double> grid1,
                                        std::vector<double> grid2,
                                        std::vector<double> values_row_major) {
  require(!grid1.empty() && !grid2.empty(), "tensor: empty grid");
  require(values_row_major.size() == grid1.size() * grid2.size(),
          "tensor: values size must be |grid1| x |grid2|");
  for (size_t i = 0; i + 1 < grid1.size(); ++i)
    require(grid1[i] < grid1[i + 1], "tensor: grid1 not increasing");
  for (size_t j = 0; j + 1 < grid2.size(); ++j)
    require(grid2[j] < grid2[j + 1], "tensor: grid2 not increasing");
  require(grid1.front() > 0.0 && grid2.front() > 0.0, "tensor: radii must be positive");
  for (double v : values_row_major) require(v >= 0.0, "tensor: negative value");
  BiRadialSurface s;
  s.separable_ = false;
  s.grid1_ = std::move(grid1);
  s.grid2_ = std::move(grid2);
  s.values_ = std::move(values_row_major);
  return s;
}

double BiRadialSurface::operator()(double t, double tau) const {
  if (separable_) return (*f1_)(t) * (*f2_)(tau);
  auto it1 = std::upper_bound(grid1_.begin(), grid1_.end(), t);
  auto it2 = std::upper_bound(grid2_.begin(), grid2_.end(), tau);
  if (it1 == grid1_.end() || it2 == grid2_.end()) return 0.0;
  const size_t i = static_cast<size_t>(it1 - grid1_.begin());
  const size_t j = static_cast<size_t>(it2 - grid2_.begin());
  return values_[i * grid2_.size() + j];
}

const RadialProfile& BiRadialSurface::factor1() const {
  if (!separable_) throw std::logic_error("tensor surface has no factors");
  return *f1_;
}

const RadialProfile& BiRadialSurface::factor2() const {
  if (!separable_) throw std::logic_error("tensor surface has no factors");
  return *f2_;
}

BiDecreasingProfile::BiDecreasingProfile(BiRadialSurface s)
    : surface_(std::move(s)) {
  if (surface_.is_separable()) {
    DecreasingProfile check1(surface_.factor1());
    DecreasingProfile check2(surface_.factor2());
    return;
  }
  const auto& g1 = surface_.grid1();
  const auto& g2 = surface_.grid2();
  const auto& v = surface_.values();
  const size_t m = g1.size(), k = g2.size();
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j + 1 < k; ++j)
      if (v[i * k + j] < v[i * k + j + 1])
        throw std::invalid_argument("BiDecreasingProfile: increases in tau");
  for (size_t j = 0; j < k; ++j)
    for (size_t i = 0; i + 1 < m; ++i)
      if (v[i * k + j] < v[(i + 1) * k + j])
        throw std::invalid_argument("BiDecreasingProfile: increases in t");
}

}  // namespace rcone
