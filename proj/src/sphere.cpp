#include "capball/sphere.hpp"

#include <cmath>
#include <limits>

#include "capball/errors.hpp"
#include "capball/numerics.hpp"

namespace capball {

using numerics::kPi;

BoundaryPoint::BoundaryPoint(std::vector<cplx> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw ConstructionError("boundary point needs at least one coordinate");
  double norm2 = 0.0;
  for (const cplx& c : coords_) norm2 += std::norm(c);
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
    throw ConstructionError("boundary point must be a finite nonzero vector");
  }
  // already-unit input is kept bitwise so serialization round trips exactly
  if (std::abs(norm2 - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) return;
  const double inv = 1.0 / std::sqrt(norm2);
  for (cplx& c : coords_) c *= inv;
}

BoundaryPoint BoundaryPoint::from_real(std::span<const double> coords) {
  if (coords.size() % 2 != 0) {
    throw ConstructionError("real coordinates must come in (re, im) pairs");
  }
  std::vector<cplx> c(coords.size() / 2);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = {coords[2 * k], coords[2 * k + 1]};
  return BoundaryPoint(std::move(c));
}

BoundaryPoint BoundaryPoint::on_circle(double theta) {
  return BoundaryPoint({std::polar(1.0, theta)});
}

BoundaryPoint BoundaryPoint::basis(int d, int k) {
  std::vector<cplx> c(d, 0.0);
  c.at(k) = 1.0;
  return BoundaryPoint(std::move(c));
}

std::vector<double> BoundaryPoint::to_real() const {
  std::vector<double> out;
  out.reserve(2 * coords_.size());
  for (const cplx& c : coords_) {
    out.push_back(c.real());
    out.push_back(c.imag());
  }
  return out;
}

cplx hermitian_inner(std::span<const cplx> z, std::span<const cplx> w) {
  cplx s = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) s += z[k] * std::conj(w[k]);
  return s;
}

cplx hermitian_inner(const BoundaryPoint& z, const BoundaryPoint& w) {
  return hermitian_inner(z.coords(), w.coords());
}

double koranyi_distance(const BoundaryPoint& z, const BoundaryPoint& w) {
  return std::sqrt(std::abs(1.0 - hermitian_inner(z, w)));
}

void QuadratureRule::validate() const {
  if (nodes.size() != weights.size() || nodes.empty()) {
    throw ConstructionError("quadrature rule needs one weight per node");
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw ConstructionError("quadrature weights must be positive");
  }
  const double total = numerics::compensated_sum(weights);
  if (std::abs(total - 1.0) > 1e-12) {
    throw ConstructionError("quadrature weights must sum to 1");
  }
  for (const auto& n : nodes) {
    if (n.dim() != d) throw ConstructionError("quadrature node has wrong dimension");
  }
}

namespace {

QuadratureRule circle_rule(int n) {
  if (n < 1 || n > kMaxCircleNodes) throw ConfigError("circle resolution out of range");
  QuadratureRule rule;
  rule.d = 1;
  rule.nodes.reserve(n);
  rule.weights.assign(n, 1.0 / n);
  for (int k = 0; k < n; ++k) rule.nodes.push_back(BoundaryPoint::on_circle(2.0 * kPi * k / n));
  return rule;
}

QuadratureRule simplex_rule_d3(int n) {
  if (n < 1 || n > kMaxLatitudeNodesD3) throw ConfigError("d=3 resolution out of range");
  const int phases = 2 * n;
  const auto& g = numerics::gauss_legendre(n);
  QuadratureRule rule;
  rule.d = 3;
  for (int i = 0; i < n; ++i) {
    const double x = 0.5 * (g.nodes[i] + 1.0);
    for (int j = 0; j < n; ++j) {
      const double y = 0.5 * (g.nodes[j] + 1.0);
      // uniform density 2 on the simplex; collapsed-coordinate Jacobian (1 - x)
      const double w = 2.0 * (1.0 - x) * 0.25 * g.weights[i] * g.weights[j] /
                       (static_cast<double>(phases) * phases * phases);
      const double r1 = std::sqrt(x);
      const double r2 = std::sqrt((1.0 - x) * y);
      const double r3 = std::sqrt((1.0 - x) * (1.0 - y));
      for (int a = 0; a < phases; ++a) {
        for (int b = 0; b < phases; ++b) {
          for (int c = 0; c < phases; ++c) {
            rule.nodes.emplace_back(std::vector<cplx>{std::polar(r1, 2.0 * kPi * a / phases),
                                                      std::polar(r2, 2.0 * kPi * b / phases),
                                                      std::polar(r3, 2.0 * kPi * c / phases)});
            rule.weights.push_back(w);
          }
        }
      }
    }
  }
  return rule;
}

}  // namespace

QuadratureRule make_product_quadrature_d2(int latitude_nodes, int phase1_nodes,
                                          int phase2_nodes) {
  if (latitude_nodes < 1 || phase1_nodes < 1 || phase2_nodes < 1) {
    throw ConfigError("product rule node counts must be positive");
  }
  const double total = static_cast<double>(latitude_nodes) * phase1_nodes * phase2_nodes;
  if (total > 1.0e8) throw ConfigError("product rule too large");
  const auto& g = numerics::gauss_legendre(latitude_nodes);
  QuadratureRule rule;
  rule.d = 2;
  rule.nodes.reserve(static_cast<std::size_t>(total));
  rule.weights.reserve(static_cast<std::size_t>(total));
  // |z_1|^2 is uniform on [0, 1] and both phases are uniform under sigma
  for (int i = 0; i < latitude_nodes; ++i) {
    const double u = 0.5 * (g.nodes[i] + 1.0);
    const double w = 0.5 * g.weights[i] / (static_cast<double>(phase1_nodes) * phase2_nodes);
    const double r1 = std::sqrt(u);
    const double r2 = std::sqrt(1.0 - u);
    for (int a = 0; a < phase1_nodes; ++a) {
      const cplx z1 = std::polar(r1, 2.0 * kPi * a / phase1_nodes);
      for (int b = 0; b < phase2_nodes; ++b) {
        rule.nodes.emplace_back(std::vector<cplx>{z1, std::polar(r2, 2.0 * kPi * b / phase2_nodes)});
        rule.weights.push_back(w);
      }
    }
  }
  return rule;
}

QuadratureRule make_quadrature(int d, int resolution) {
  switch (d) {
    case 1:
      return circle_rule(resolution);
    case 2:
      if (resolution < 1 || resolution > kMaxLatitudeNodesD2) {
        throw ConfigError("d=2 resolution out of range");
      }
      return make_product_quadrature_d2(resolution, 2 * resolution, 2 * resolution);
    case 3:
      return simplex_rule_d3(resolution);
    default:
      throw UnsupportedDimension(d);
  }
}

double koranyi_ball_measure(const BoundaryPoint& center, double delta,
                            const QuadratureRule& rule) {
  if (!(delta > 0.0)) throw DomainError("Koranyi radius must be positive");
  if (center.dim() != rule.d) throw DomainError("center dimension does not match rule");
  numerics::CompensatedSum mass;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    if (koranyi_distance(rule.nodes[i], center) <= delta) mass.add(rule.weights[i]);
  }
  return mass.value();
}

ScalingFit fit_koranyi_scaling(const BoundaryPoint& center, std::span<const double> deltas,
                               const QuadratureRule& rule) {
  ScalingFit fit;
  std::vector<double> lx;
  std::vector<double> ly;
  for (double delta : deltas) {
    const double m = koranyi_ball_measure(center, delta, rule);
    fit.deltas.push_back(delta);
    fit.measures.push_back(m);
    if (m > 0.0) {
      lx.push_back(std::log(delta));
      ly.push_back(std::log(m));
    }
  }
  if (lx.size() < 2) throw DomainError("ball measures vanish; rule too coarse for these radii");
  const auto [slope, intercept] = numerics::linear_fit(lx, ly);
  fit.exponent = slope;
  fit.log_constant = intercept;
  return fit;
}

nlohmann::json to_json(const QuadratureRule& rule) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : rule.nodes) nodes.push_back(n.to_real());
  return {{"d", rule.d}, {"nodes", nodes}, {"weights", rule.weights}};
}

QuadratureRule quadrature_from_json(const nlohmann::json& j) {
  QuadratureRule rule;
  rule.d = j.at("d").get<int>();
  for (const auto& n : j.at("nodes")) {
    rule.nodes.push_back(BoundaryPoint::from_real(n.get<std::vector<double>>()));
  }
  rule.weights = j.at("weights").get<std::vector<double>>();
  rule.validate();
  return rule;
}

}  // namespace capball
