#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

namespace capball::detail {

// d = 2 cap about an axis in the coordinate x = <zeta, axis> = 1 - rho e^{i theta}:
// theta in [-pi/2, pi/2], rho <= rho_max(theta) = min(delta^2, 2 cos theta).
// sigma pushes forward to area / pi in x. Patches use u = (rho / rho_max)^2,
// with area element rho_max(theta)^2 / 2 du dtheta.
struct CapGeometry {
  double delta2;
  double theta_star;  // rho_max switches from delta^2 to 2 cos theta here

  explicit CapGeometry(double delta)
      : delta2(std::min(delta * delta, 2.0)),
        theta_star(std::acos(std::min(1.0, 0.5 * std::min(delta * delta, 2.0)))) {}

  double rho_max(double theta) const { return std::min(delta2, 2.0 * std::cos(theta)); }

  // int rho_max^2 over [a, b], with [a, b] inside one branch
  double rho_max2_integral(double a, double b) const {
    const double mid = 0.5 * (a + b);
    if (std::abs(mid) <= theta_star) return delta2 * delta2 * (b - a);
    auto prim = [](double t) { return 2.0 * (t + std::sin(t) * std::cos(t)); };
    return prim(b) - prim(a);
  }

  std::complex<double> point(double theta, double u) const {
    const double rho = std::sqrt(u) * rho_max(theta);
    return 1.0 - rho * std::polar(1.0, theta);
  }
};

}  // namespace capball::detail
