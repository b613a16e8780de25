#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "capball/errors.hpp"
#include "capball/numerics.hpp"
#include "capball/sets.hpp"
#include "cap_geometry.hpp"

namespace capball {

using numerics::kPi;

namespace {

constexpr double kTwoPi = 2.0 * kPi;

double chord(double angle) { return std::abs(2.0 * std::sin(0.5 * angle)); }

}  // namespace

double arc_self_average(double index, double h) {
  if (!(h > 0.0) || h > kTwoPi * (1.0 + 1e-12)) throw DomainError("subarc length out of range");
  // triangular density of |theta - phi| for two uniform points on the subarc
  auto density = [h](double u) { return 2.0 * (h - u) / (h * h); };
  // correction term is smooth on [0, h/2]; near u = 2 pi it has an integrable
  // singularity, so the upper half is integrated in offsets from h
  auto integrate_correction = [&](auto&& corr) {
    const double lower = numerics::integrate_gauss(corr, 0.0, 0.5 * h, 24, 2);
    const double upper = numerics::integrate_singular_offset(
        [&](double v) { return corr(h - v); }, 0.5 * h, 24, 1e-3, 0.25, 4.0);
    return lower + upper;
  };
  if (index == 1.0) {
    // int_0^h (1 - log u) density = 5/2 - log h
    const double main = 2.5 - std::log(h);
    auto corr = [&](double u) {
      const double c = chord(u);
      return -std::log(c / u) * density(u);
    };
    return main + integrate_correction(corr);
  }
  const double a = 1.0 - index;
  if (!(a >= 0.0 && a < 1.0)) throw DomainError("subarc self-average needs 0 <= 1 - index < 1");
  // int_0^h u^{-a} density = 2 h^{-a} / ((1 - a)(2 - a))
  const double main = 2.0 * std::pow(h, -a) / ((1.0 - a) * (2.0 - a));
  if (a == 0.0) return main;
  auto corr = [&](double u) {
    const double c = chord(u);
    return (std::pow(c, -a) - std::pow(u, -a)) * density(u);
  };
  return main + integrate_correction(corr);
}

RingKernel::RingKernel(double a) : a_(a), hyp_(0.5 * a, 0.5 * a) {}

double RingKernel::from_parts(double b, double gap2) const {
  const double c2 = b * b + gap2;
  if (a_ == 0.0) return 1.0 - 0.5 * std::log(c2);
  if (!(gap2 > 0.0)) {
    // coincident axis products: 2F1(a/2, a/2; 1; 1) is finite for a < 1
    if (c2 == 0.0) return std::numeric_limits<double>::infinity();
    return std::pow(c2, -0.5 * a_) * std::tgamma(1.0 - a_) /
           std::pow(std::tgamma(1.0 - 0.5 * a_), 2);
  }
  return std::pow(c2, -0.5 * a_) * hyp_.eval(b * b / c2, gap2 / c2);
}

double RingKernel::operator()(cplx x, cplx y) const {
  const double b = std::sqrt(std::max(0.0, 1.0 - std::norm(x)) * std::max(0.0, 1.0 - std::norm(y)));
  return from_parts(b, std::norm(x - y));
}

namespace {

// --------------------------------------------------------------------------
// d = 1

std::vector<int> allocate_cells(const std::vector<std::pair<double, double>>& arcs, int mesh) {
  const int n = static_cast<int>(arcs.size());
  if (n > mesh) {
    throw ConstructionError("mesh " + std::to_string(mesh) + " is smaller than the " +
                            std::to_string(n) + " components of the set");
  }
  double total = 0.0;
  for (const auto& a : arcs) total += a.second;
  std::vector<int> count(n);
  std::vector<double> remainder(n);
  int used = 0;
  for (int i = 0; i < n; ++i) {
    const double exact = mesh * arcs[i].second / total;
    count[i] = std::max(1, static_cast<int>(std::floor(exact + 1e-9)));
    remainder[i] = exact - count[i];
    used += count[i];
  }
  // hand out leftovers by largest remainder, lowest index on ties
  while (used < mesh) {
    int best = 0;
    for (int i = 1; i < n; ++i) {
      if (remainder[i] > remainder[best] + 1e-12) best = i;
    }
    if (remainder[best] <= 1e-9) break;
    ++count[best];
    remainder[best] -= 1.0;
    ++used;
  }
  while (used > mesh) {
    int best = 0;
    for (int i = 1; i < n; ++i) {
      if (count[i] > count[best]) best = i;
    }
    --count[best];
    --used;
  }
  return count;
}

CellComplex discretize_circle(const SetSpec& set, const KernelSpec& spec, int mesh) {
  const auto arcs = circle_arcs(set);
  const auto count = allocate_cells(arcs, mesh);
  CellComplex cx;
  cx.d = 1;
  cx.layout = CellLayout::Arcs;
  cx.spec = spec;
  std::map<double, double> self_cache;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const auto [start, length] = arcs[i];
    const double h = length / count[i];
    auto it = self_cache.find(h);
    if (it == self_cache.end()) it = self_cache.emplace(h, arc_self_average(2.0 * spec.s, h)).first;
    const double diameter = h >= kPi ? std::sqrt(2.0) : std::sqrt(chord(h));
    for (int j = 0; j < count[i]; ++j) {
      Cell c{BoundaryPoint::on_circle(start + (j + 0.5) * h), h / kTwoPi, diameter, h, {}};
      cx.cells.push_back(std::move(c));
      cx.self_interaction.push_back(it->second);
    }
  }
  return cx;
}

// --------------------------------------------------------------------------
// d = 2 caps as ring cells. With x = <zeta, axis> = 1 - rho e^{i theta}, the
// cap is theta in [-pi/2, pi/2], rho <= rho_max(theta) = min(delta^2, 2 cos theta),
// and sigma pushes forward to area / pi in x. Cells are patches
// [theta_a, theta_b] x [u_a, u_b] in (theta, u = (rho / rho_max)^2); the
// area element is rho_max(theta)^2 / 2 du dtheta.

CellComplex discretize_cap_rings(const SetSpec& set, const KernelSpec& spec, int mesh) {
  const BoundaryPoint& axis = *set.center;
  const detail::CapGeometry geo(set.delta);
  const int radial = std::max(1, static_cast<int>(std::lround(std::sqrt(mesh / 4.0))));
  const int angular_total = mesh / radial;
  // angular ranges: middle [-theta*, theta*] and two outer ranges
  std::vector<std::pair<double, double>> ranges;
  const double outer_width = 0.5 * kPi - geo.theta_star;
  if (geo.theta_star > 0.0) ranges.emplace_back(-geo.theta_star, geo.theta_star);
  if (outer_width > 1e-15) {
    ranges.emplace_back(-0.5 * kPi, -geo.theta_star);
    ranges.emplace_back(geo.theta_star, 0.5 * kPi);
  }
  std::vector<double> range_mass;
  for (const auto& r : ranges) range_mass.push_back(geo.rho_max2_integral(r.first, r.second));
  // sectors per range in proportion to mass: outer ranges get equal counts
  // (at least one), the middle range takes the rest
  std::vector<int> sectors(ranges.size(), 1);
  {
    const double total = std::accumulate(range_mass.begin(), range_mass.end(), 0.0);
    const bool has_middle = geo.theta_star > 0.0;
    const std::size_t first_outer = has_middle ? 1 : 0;
    int outer = 0;
    if (ranges.size() > first_outer) {
      outer = std::max(1, static_cast<int>(std::floor(angular_total * range_mass[first_outer] / total)));
      if (has_middle) outer = std::min(outer, (angular_total - 1) / 2);
      for (std::size_t i = first_outer; i < ranges.size(); ++i) sectors[i] = outer;
    }
    if (has_middle) sectors[0] = angular_total - outer * static_cast<int>(ranges.size() - 1);
    const int used = std::accumulate(sectors.begin(), sectors.end(), 0);
    if (outer < 0 || sectors[0] < 1 || used > angular_total) {
      throw ConstructionError("mesh too small for a ring discretization of this cap");
    }
  }

  CellComplex cx;
  cx.d = 2;
  cx.layout = CellLayout::Rings;
  cx.spec = spec;
  cx.axis = axis;
  cx.cap_delta = set.delta;
  const cplx perp[2] = {-std::conj(axis[1]), std::conj(axis[0])};
  auto lift = [&](cplx x) {
    const double r = std::sqrt(std::max(0.0, 1.0 - std::norm(x)));
    return BoundaryPoint({x * axis[0] + r * perp[0], x * axis[1] + r * perp[1]});
  };
  const RingKernel ring(spec.a);
  const auto& g = numerics::gauss_legendre(6);

  for (std::size_t ri = 0; ri < ranges.size(); ++ri) {
    const double width = (ranges[ri].second - ranges[ri].first) / sectors[ri];
    for (int k = 0; k < sectors[ri]; ++k) {
      const double ta = ranges[ri].first + k * width;
      const double tb = ta + width;
      const double sector_integral = geo.rho_max2_integral(ta, tb);
      for (int j = 0; j < radial; ++j) {
        const double ua = static_cast<double>(j) / radial;
        const double ub = static_cast<double>(j + 1) / radial;
        Cell c{lift(geo.point(0.5 * (ta + tb), 0.5 * (ua + ub))), 0.0, 0.0, 0.0, {}};
        c.mass = (ub - ua) * sector_integral / (2.0 * kPi);
        c.ring_x = geo.point(0.5 * (ta + tb), 0.5 * (ua + ub));
        // Koranyi diameter: max of C + B over corner and centre pairs
        const cplx probes[5] = {geo.point(ta, ua), geo.point(ta, ub), geo.point(tb, ua),
                                geo.point(tb, ub), c.ring_x};
        double diam2 = 0.0;
        for (const cplx& x : probes) {
          for (const cplx& y : probes) {
            const double b = std::sqrt(std::max(0.0, 1.0 - std::norm(x)) *
                                       std::max(0.0, 1.0 - std::norm(y)));
            diam2 = std::max(diam2, std::abs(1.0 - x * std::conj(y)) + b);
          }
        }
        c.diameter = std::sqrt(diam2);
        // self-interaction: patch x patch average of the ring kernel with
        // the area element rho_max(theta)^2 du dtheta
        std::vector<cplx> pts;
        std::vector<double> wts;
        for (std::size_t p = 0; p < g.nodes.size(); ++p) {
          const double th = ta + 0.5 * (g.nodes[p] + 1.0) * width;
          const double rm = geo.rho_max(th);
          for (std::size_t q = 0; q < g.nodes.size(); ++q) {
            const double u = ua + 0.5 * (g.nodes[q] + 1.0) * (ub - ua);
            pts.push_back(geo.point(th, u));
            wts.push_back(g.weights[p] * g.weights[q] * rm * rm);
          }
        }
        numerics::CompensatedSum num;
        numerics::CompensatedSum den;
        for (std::size_t p = 0; p < pts.size(); ++p) {
          for (std::size_t q = 0; q < pts.size(); ++q) {
            const double w = wts[p] * wts[q];
            num.add(w * ring(pts[p], pts[q]));
            den.add(w);
          }
        }
        cx.cells.push_back(std::move(c));
        cx.self_interaction.push_back(num.value() / den.value());
        cx.patches.push_back({ta, tb, ua, ub});
      }
    }
  }
  return cx;
}

// --------------------------------------------------------------------------
// d >= 2 general sets: clusters of quadrature nodes binned on a grid in
// R^{2d}. The bin size is the smallest on a geometric ladder that gives at
// most `mesh` clusters.

std::size_t rule_size(int d, int n) {
  return d == 2 ? static_cast<std::size_t>(8) * n * n * n
                : static_cast<std::size_t>(8) * n * n * n * n * n;
}

CellComplex discretize_clusters(const SetSpec& set, const KernelSpec& spec, int mesh) {
  const int d = set.dimension();
  if (d != 2 && d != 3) throw UnsupportedDimension(d);
  const int max_n = d == 2 ? kMaxLatitudeNodesD2 : kMaxLatitudeNodesD3;
  // smallest resolution whose member count reaches ~8 nodes per cell
  std::vector<BoundaryPoint> nodes;
  std::vector<double> weights;
  for (int n = 2; n <= max_n; n += 2) {
    if (rule_size(d, n) > 2'000'000 && !nodes.empty()) break;
    const auto rule = make_quadrature(d, n);
    nodes.clear();
    weights.clear();
    for (std::size_t i = 0; i < rule.size(); ++i) {
      if (set_contains(set, rule.nodes[i])) {
        nodes.push_back(rule.nodes[i]);
        weights.push_back(rule.weights[i]);
      }
    }
    if (nodes.size() >= static_cast<std::size_t>(8) * mesh) break;
  }
  if (nodes.empty()) throw ConstructionError("set contains no quadrature nodes at any resolution");

  using Key = std::vector<long>;
  auto bin = [&](double h) {
    std::map<Key, std::vector<std::size_t>> bins;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      Key k;
      for (const auto x : nodes[i].to_real()) k.push_back(static_cast<long>(std::floor(x / h)));
      bins[k].push_back(i);
    }
    return bins;
  };
  double h = 0.01;
  auto bins = bin(h);
  while (bins.size() > static_cast<std::size_t>(mesh)) {
    h *= 1.25;
    bins = bin(h);
  }

  CellComplex cx;
  cx.d = d;
  cx.layout = CellLayout::Clusters;
  cx.spec = spec;
  for (const auto& [key, idx] : bins) {
    std::vector<BoundaryPoint> pts;
    std::vector<double> wts;
    double mass = 0.0;
    std::vector<double> mean(2 * d, 0.0);
    for (std::size_t i : idx) {
      pts.push_back(nodes[i]);
      wts.push_back(weights[i]);
      mass += weights[i];
      const auto r = nodes[i].to_real();
      for (int k = 0; k < 2 * d; ++k) mean[k] += weights[i] * r[k];
    }
    std::size_t best = 0;
    double best_dist = 1e300;
    for (std::size_t m = 0; m < pts.size(); ++m) {
      const auto r = pts[m].to_real();
      double dist = 0.0;
      for (int k = 0; k < 2 * d; ++k) dist += (r[k] - mean[k] / mass) * (r[k] - mean[k] / mass);
      if (dist < best_dist) {
        best_dist = dist;
        best = m;
      }
    }
    double diameter = 0.0;
    numerics::CompensatedSum num;
    numerics::CompensatedSum den;
    for (std::size_t p = 0; p < pts.size(); ++p) {
      for (std::size_t q = 0; q < pts.size(); ++q) {
        if (p == q) continue;
        diameter = std::max(diameter, koranyi_distance(pts[p], pts[q]));
        num.add(wts[p] * wts[q] * da_kernel_abs(spec, pts[p], pts[q]));
        den.add(wts[p] * wts[q]);
      }
    }
    double self = 0.0;
    if (pts.size() > 1) {
      self = num.value() / den.value();
    } else {
      // single node: kernel at the Koranyi radius of a ball of the same mass
      diameter = std::pow(mass, 1.0 / (2 * d));
      self = da_kernel_abs_from_gap(spec, diameter * diameter);
    }
    cx.cells.push_back(Cell{pts[best], mass, diameter, 0.0, {}});
    cx.self_interaction.push_back(self);
    cx.members.push_back(std::move(pts));
    cx.member_weights.push_back(std::move(wts));
  }
  return cx;
}

}  // namespace

CellComplex discretize(const SetSpec& set, const KernelSpec& spec, int mesh) {
  set.validate();
  if (mesh < 1 || mesh > kMaxMesh) throw ConfigError("mesh out of range");
  const int d = set.dimension();
  if (spec.d != d) throw DomainError("kernel dimension does not match set");
  spec.require_capacity_range();
  if (d == 1) return discretize_circle(set, spec, mesh);
  if (d == 2 && set.kind == SetKind::Cap) return discretize_cap_rings(set, spec, mesh);
  return discretize_clusters(set, spec, mesh);
}

nlohmann::json to_json(const CellComplex& cx) {
  nlohmann::json j;
  j["d"] = cx.d;
  j["layout"] = cx.layout == CellLayout::Arcs    ? "arcs"
                : cx.layout == CellLayout::Rings ? "rings"
                                                 : "clusters";
  j["a"] = cx.spec.a;
  j["s"] = cx.spec.s;
  if (cx.axis) j["axis"] = cx.axis->to_real();
  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t i = 0; i < cx.cells.size(); ++i) {
    const auto& c = cx.cells[i];
    nlohmann::json e;
    e["center"] = c.center.to_real();
    e["mass"] = c.mass;
    e["diameter"] = c.diameter;
    e["selfInteraction"] = cx.self_interaction[i];
    if (cx.layout == CellLayout::Rings) e["ringX"] = {c.ring_x.real(), c.ring_x.imag()};
    cells.push_back(e);
  }
  j["cells"] = cells;
  return j;
}

}  // namespace capball
