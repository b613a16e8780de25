#pragma once

#include <complex>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace capball {

using cplx = std::complex<double>;

/// A point on the unit sphere of C^d, stored as d complex coordinates.
/// Construction normalizes the input and rejects the zero vector.
class BoundaryPoint {
 public:
  explicit BoundaryPoint(std::vector<cplx> coords);
  /// 2d real numbers read as (re, im) pairs per complex coordinate.
  static BoundaryPoint from_real(std::span<const double> coords);
  /// e^{i theta} on the unit circle (d = 1).
  static BoundaryPoint on_circle(double theta);
  /// k-th standard basis vector of C^d (0-based).
  static BoundaryPoint basis(int d, int k);

  int dim() const { return static_cast<int>(coords_.size()); }
  const cplx& operator[](std::size_t k) const { return coords_[k]; }
  const std::vector<cplx>& coords() const { return coords_; }
  std::vector<double> to_real() const;

  bool operator==(const BoundaryPoint&) const = default;

 private:
  std::vector<cplx> coords_;
};

/// <z, w> = sum_k z_k conj(w_k); z and w may be any vectors of equal length.
cplx hermitian_inner(std::span<const cplx> z, std::span<const cplx> w);
cplx hermitian_inner(const BoundaryPoint& z, const BoundaryPoint& w);

/// Koranyi metric |1 - <z, w>|^{1/2}.
double koranyi_distance(const BoundaryPoint& z, const BoundaryPoint& w);

/// Quadrature for the normalized surface measure on the sphere of C^d.
struct QuadratureRule {
  int d = 1;
  std::vector<BoundaryPoint> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  /// Throws ConstructionError unless weights are positive and sum to 1.
  void validate() const;
};

inline constexpr int kMaxCircleNodes = 1 << 24;
inline constexpr int kMaxLatitudeNodesD2 = 64;
inline constexpr int kMaxLatitudeNodesD3 = 10;

/// d = 1: `resolution` equispaced nodes (trapezoid rule).
/// d = 2: `resolution` Gauss nodes in u = |z_1|^2 times 2*resolution equispaced
///        nodes in each phase.
/// d = 3: collapsed simplex coordinates for (|z_1|^2, |z_2|^2, |z_3|^2) with
///        `resolution` Gauss nodes each and 2*resolution nodes per phase.
/// Other d throw UnsupportedDimension.
QuadratureRule make_quadrature(int d, int resolution);

/// d = 2 product rule with explicit node counts in u, arg z_1 and arg z_2.
QuadratureRule make_product_quadrature_d2(int latitude_nodes, int phase1_nodes, int phase2_nodes);

/// Integral of f against the rule, summed in node order.
template <class F>
double integrate(const QuadratureRule& rule, F&& f);

/// Quadrature mass of the Koranyi ball {zeta : d(zeta, center) <= delta}.
double koranyi_ball_measure(const BoundaryPoint& center, double delta,
                            const QuadratureRule& rule);

struct ScalingFit {
  double exponent = 0.0;
  double log_constant = 0.0;
  std::vector<double> deltas;
  std::vector<double> measures;
};

/// Log-log least-squares fit of ball measure against radius.
ScalingFit fit_koranyi_scaling(const BoundaryPoint& center, std::span<const double> deltas,
                               const QuadratureRule& rule);

nlohmann::json to_json(const QuadratureRule& rule);
QuadratureRule quadrature_from_json(const nlohmann::json& j);

}  // namespace capball

#include "capball/numerics.hpp"

template <class F>
double capball::integrate(const QuadratureRule& rule, F&& f) {
  numerics::CompensatedSum s;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s.add(rule.weights[i] * f(rule.nodes[i]));
  return s.value();
}
