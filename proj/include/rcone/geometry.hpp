#pragma once

// Homogeneous groups enter every radial formula through three scalars: the
// homogeneous dimension Q, the surface measure sigmaS of the unit sphere
// {r = 1}, and the quasi-triangle constant c0. Euclidean instances carry
// their dimension as well, which unlocks exact spherical kernel averages.

#include <functional>
#include <optional>

#include "rcone/integrate.hpp"

namespace rcone {

class GroupGeometry {
 public:
  static GroupGeometry euclidean(int n);
  // Paper-normalized variant: |B(e,1)| = 1 forces sigmaS = Q.
  static GroupGeometry abstract_group(double Q, double sigmaS, double c0);

  double Q() const { return q_; }
  double sigmaS() const { return sigma_s_; }
  double c0() const { return c0_; }
  std::optional<int> euclidean_dim() const { return euclidean_dim_; }

  double ball_volume(double t) const;  // |B(e,t)| = sigmaS t^Q / Q

 private:
  GroupGeometry(double Q, double sigmaS, double c0, std::optional<int> n);
  double q_;
  double sigma_s_;
  double c0_;
  std::optional<int> euclidean_dim_;
};

struct ProductGeometry {
  GroupGeometry g1;
  GroupGeometry g2;
};

// sigmaS · ∫ u(t) t^(Q-1) dt over [a, b] ⊆ [0, ∞] for a radial integrand u.
Integral polar_integral(const GroupGeometry& geom,
                        const std::function<double(double)>& u, double a,
                        double b, const QuadratureOptions& opt = {});

// Spherical average of the Riesz kernel on ℝⁿ:
//   k(R, s) = ∫_{S^{n-1}} |R e1 - s ω|^(alpha-n) dσ(ω),
// so that for radial f, (I_alpha f)(x) = ∫ f(s) s^(n-1) k(r(x), s) ds.
// n = 1 and n = 3 are closed forms; n = 2 uses graded angular quadrature.
// Returns +inf at R = s when the average genuinely diverges (alpha <= n-1).
double euclidean_kernel_average(const GroupGeometry& geom, double R, double s,
                                double alpha);

}  // namespace rcone
