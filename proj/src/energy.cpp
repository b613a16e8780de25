#include "capball/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cap_geometry.hpp"
#include "capball/errors.hpp"
#include "capball/measures.hpp"
#include "capball/numerics.hpp"

namespace capball {

using numerics::kPi;

std::string to_string(EnergyFlavor flavor) { return flavor == EnergyFlavor::Da ? "da" : "bessel"; }

EnergyFlavor parse_flavor(const std::string& name) {
  if (name == "da") return EnergyFlavor::Da;
  if (name == "bessel") return EnergyFlavor::Bessel;
  throw ConfigError("unknown energy flavor '" + name + "' (expected da or bessel)");
}

void EnergyMatrix::validate() const {
  if (entries.rows() != entries.cols() || entries.rows() == 0) {
    throw ConstructionError("energy matrix must be square and nonempty");
  }
  const auto n = entries.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = entries(i, j);
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConstructionError("energy matrix entries must be positive and finite");
      }
      if (std::abs(v - entries(j, i)) > 1e-14 * std::abs(v)) {
        throw ConstructionError("energy matrix must be symmetric");
      }
    }
  }
}

EnergyMatrix EnergyMatrix::scaled(double lambda) const {
  if (!(lambda > 0.0)) throw DomainError("kernel scale must be positive");
  EnergyMatrix out = *this;
  out.entries *= lambda;
  return out;
}

namespace {

EnergyMatrix da_matrix(const CellComplex& cx, const KernelSpec& spec) {
  const auto n = static_cast<Eigen::Index>(cx.size());
  EnergyMatrix m;
  m.flavor = EnergyFlavor::Da;
  m.entries.resize(n, n);
  const RingKernel ring(spec.a);
  for (Eigen::Index i = 0; i < n; ++i) {
    m.entries(i, i) = cx.self_interaction[i];
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = cx.layout == CellLayout::Rings
                           ? ring(cx.cells[i].ring_x, cx.cells[j].ring_x)
                           : da_kernel_abs(spec, cx.cells[i].center, cx.cells[j].center);
      m.entries(i, j) = v;
      m.entries(j, i) = v;
    }
  }
  return m;
}

struct L2Nodes {
  std::vector<BoundaryPoint> points;  // arcs
  std::vector<cplx> ring_x;           // rings
  std::vector<double> weights;        // sigma measure
};

// nodes graded toward both ends of [start, start + length]
void add_panel(L2Nodes& out, double start, double length, int order) {
  const auto half = numerics::singular_offset_rule(0.5 * length, order, 1e-2);
  for (std::size_t k = 0; k < half.nodes.size(); ++k) {
    const double w = half.weights[k] / (2.0 * kPi);
    out.points.push_back(BoundaryPoint::on_circle(start + half.nodes[k]));
    out.weights.push_back(w);
    out.points.push_back(BoundaryPoint::on_circle(start + length - half.nodes[k]));
    out.weights.push_back(w);
  }
}

L2Nodes arc_nodes(const CellComplex& cx, int order) {
  L2Nodes out;
  // cell panels, then the gaps between consecutive cells
  std::vector<std::pair<double, double>> cells;
  for (const auto& c : cx.cells) {
    const double start = std::arg(c.center[0]) - 0.5 * c.arc_length;
    cells.emplace_back(std::fmod(start + 4.0 * kPi, 2.0 * kPi), c.arc_length);
  }
  std::sort(cells.begin(), cells.end());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    add_panel(out, cells[i].first, cells[i].second, order);
    const double end = cells[i].first + cells[i].second;
    const double next = i + 1 < cells.size() ? cells[i + 1].first : cells[0].first + 2.0 * kPi;
    const double gap = next - end;
    if (gap > 1e-12 * 2.0 * kPi) add_panel(out, end, gap, order);
  }
  return out;
}

L2Nodes ring_nodes(const CellComplex& cx, int order) {
  L2Nodes out;
  const detail::CapGeometry geo(cx.cap_delta);
  const auto& g = numerics::gauss_legendre(order);
  for (const auto& patch : cx.patches) {
    const double wt = 0.5 * (patch[1] - patch[0]);
    const double wu = 0.5 * (patch[3] - patch[2]);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double th = patch[0] + wt * (g.nodes[i] + 1.0);
      const double rm = geo.rho_max(th);
      for (std::size_t j = 0; j < g.nodes.size(); ++j) {
        const double u = patch[2] + wu * (g.nodes[j] + 1.0);
        out.ring_x.push_back(geo.point(th, u));
        out.weights.push_back(wt * wu * g.weights[i] * g.weights[j] * 0.5 * rm * rm / kPi);
      }
    }
  }
  // complement of the cap: rho in [delta^2, 2 cos theta], |theta| < theta*,
  // graded toward the cap boundary
  if (geo.delta2 < 2.0) {
    const int panels = 16;
    const double ts = geo.theta_star;
    for (int p = 0; p < panels; ++p) {
      const double ta = -ts + 2.0 * ts * p / panels;
      const double wt = ts / panels;
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double th = ta + wt * (g.nodes[i] + 1.0);
        const double len = 2.0 * std::cos(th) - geo.delta2;
        if (!(len > 0.0)) continue;
        const auto radial = numerics::singular_offset_rule(len, order, 1e-3);
        for (std::size_t k = 0; k < radial.nodes.size(); ++k) {
          const double rho = geo.delta2 + radial.nodes[k];
          out.ring_x.push_back(1.0 - rho * std::polar(1.0, th));
          out.weights.push_back(wt * g.weights[i] * radial.weights[k] * rho / kPi);
        }
      }
    }
  }
  return out;
}

int bessel_order(const CellComplex& cx, const QuadratureRule& rule) {
  const double per_cell = static_cast<double>(rule.size()) / cx.size();
  if (cx.d == 1) return std::clamp(static_cast<int>(per_cell / 16.0), 4, 12);
  return std::clamp(static_cast<int>(std::sqrt(per_cell / 4.0)), 3, 8);
}

EnergyMatrix bessel_matrix(const CellComplex& cx, const KernelSpec& spec, const QuadratureRule& rule) {
  if (cx.layout == CellLayout::Clusters) {
    throw ConfigError("the bessel flavor needs arc or ring cells (d = 1 sets or a single d = 2 cap)");
  }
  if (rule.d != cx.d) throw ConfigError("quadrature rule dimension does not match the complex");
  if (rule.size() < kBesselNodesPerCell * cx.size()) {
    throw ConfigError("quadrature rule below the bessel resolution floor of " +
                      std::to_string(kBesselNodesPerCell) + " nodes per cell");
  }
  const int order = bessel_order(cx, rule);
  const L2Nodes nodes = cx.layout == CellLayout::Arcs ? arc_nodes(cx, order) : ring_nodes(cx, order);
  const CellPotential pot(cx, spec.d - spec.s);
  const auto nn = static_cast<Eigen::Index>(nodes.weights.size());
  const auto nc = static_cast<Eigen::Index>(cx.size());
  Eigen::MatrixXd p(nn, nc);
  for (Eigen::Index q = 0; q < nn; ++q) {
    for (Eigen::Index i = 0; i < nc; ++i) {
      p(q, i) = cx.layout == CellLayout::Arcs ? pot(i, nodes.points[q]) : pot.at_ring(i, nodes.ring_x[q]);
    }
  }
  Eigen::VectorXd sw(nn);
  for (Eigen::Index q = 0; q < nn; ++q) sw(q) = std::sqrt(nodes.weights[q]);
  const Eigen::MatrixXd wp = sw.asDiagonal() * p;
  EnergyMatrix m;
  m.flavor = EnergyFlavor::Bessel;
  m.entries = wp.transpose() * wp;
  m.entries = 0.5 * (m.entries + m.entries.transpose()).eval();
  return m;
}

}  // namespace

QuadratureRule default_bessel_rule(const CellComplex& cx) {
  const std::size_t want = 4 * kBesselNodesPerCell * cx.size();
  if (cx.d == 1) return make_quadrature(1, static_cast<int>(std::max<std::size_t>(want, 64)));
  int n = 4;
  while (static_cast<std::size_t>(4) * n * n * n < want && n < kMaxLatitudeNodesD2) ++n;
  return make_quadrature(cx.d, n);
}

EnergyMatrix build_energy_matrix(const CellComplex& cx, const KernelSpec& spec, EnergyFlavor flavor,
                                 const QuadratureRule& rule) {
  if (cx.size() == 0) throw ConstructionError("empty cell complex");
  if (spec.d != cx.d) throw DomainError("kernel dimension does not match the complex");
  EnergyMatrix m = flavor == EnergyFlavor::Da ? da_matrix(cx, spec) : bessel_matrix(cx, spec, rule);
  m.validate();
  return m;
}

EnergyMatrix build_energy_matrix(const CellComplex& cx, const KernelSpec& spec, EnergyFlavor flavor) {
  if (flavor == EnergyFlavor::Da) return build_energy_matrix(cx, spec, flavor, QuadratureRule{});
  return build_energy_matrix(cx, spec, flavor, default_bessel_rule(cx));
}

double energy(const EnergyMatrix& m, std::span<const double> weights) {
  if (weights.size() != m.size()) throw DomainError("weight vector does not match the matrix");
  const Eigen::Map<const Eigen::VectorXd> w(weights.data(), static_cast<Eigen::Index>(weights.size()));
  return w.dot(m.entries * w);
}

EquilibriumResult equilibrium(const EnergyMatrix& m, double tol, long max_iter,
                              std::span<const double> start) {
  const auto n = static_cast<Eigen::Index>(m.size());
  if (n == 0) throw ConstructionError("empty energy matrix");
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
  Eigen::VectorXd w(n);
  if (start.empty()) {
    w.setConstant(1.0 / static_cast<double>(n));
  } else {
    if (start.size() != static_cast<std::size_t>(n)) throw DomainError("start does not match the matrix");
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(start[i] >= 0.0)) throw DomainError("start weights must be nonnegative");
      w(i) = start[i];
      total += start[i];
    }
    if (!(total > 0.0)) throw DomainError("start weights must not all vanish");
    w /= total;
  }
  const Eigen::MatrixXd& a = m.entries;
  Eigen::VectorXd mw = a * w;
  double f = w.dot(mw);
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  EquilibriumResult r;
  constexpr long kCheckpoint = 256;
  long it = 0;
  for (;; ++it) {
    // toward vertex: lowest index among gradient minima; away vertex: the
    // support entry with the largest gradient, lowest index on ties
    Eigen::Index s = 0;
    Eigen::Index v = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (mw(i) < mw(s)) s = i;
      if (w(i) > 0.0 && (v < 0 || mw(i) > mw(v))) v = i;
    }
    const double gap = 2.0 * (f - mw(s));
    upper = std::min(upper, f);
    lower = std::max(lower, f - gap);
    if (it % kCheckpoint == 0) r.gap_history.push_back(upper - lower);
    if (upper - lower <= tol * upper) {
      r.certified = true;
      break;
    }
    if (it >= max_iter || s == v) break;
    const double slope = 2.0 * (mw(s) - mw(v));
    const double curv = a(s, s) + a(v, v) - 2.0 * a(s, v);
    double gamma = w(v);
    if (curv > 0.0) gamma = std::min(gamma, -slope / (2.0 * curv));
    if (!(gamma > 0.0)) break;
    if (gamma >= w(v)) {
      gamma = w(v);
      w(v) = 0.0;
    } else {
      w(v) -= gamma;
    }
    w(s) += gamma;
    mw += gamma * (a.col(s) - a.col(v));
    f += gamma * slope + gamma * gamma * curv;
    if ((it + 1) % 4096 == 0) {
      mw = a * w;
      f = w.dot(mw);
    }
  }
  mw = a * w;
  f = w.dot(mw);
  r.weights.assign(w.data(), w.data() + n);
  r.energy_min = std::min(upper, f);
  r.energy_lower = std::min(lower, r.energy_min);
  r.fw_gap = r.energy_min - r.energy_lower;
  if (r.gap_history.empty() || r.gap_history.back() != r.fw_gap) r.gap_history.push_back(r.fw_gap);
  r.capacity_lower = 1.0 / r.energy_min;
  r.capacity_upper = r.energy_lower > 0.0 ? 1.0 / r.energy_lower : std::numeric_limits<double>::infinity();
  r.iterations = it;
  r.mesh = static_cast<int>(n);
  return r;
}

std::vector<double> project_to_simplex(std::span<const double> v) {
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cum += u[k];
    const double t = (cum - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(0.0, v[i] - theta);
  return out;
}

std::vector<double> projected_gradient_minimum(const EnergyMatrix& m, std::vector<double> start,
                                               int iterations, double* value) {
  const auto n = static_cast<Eigen::Index>(m.size());
  if (start.size() != static_cast<std::size_t>(n)) throw DomainError("start does not match the matrix");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.entries, Eigen::EigenvaluesOnly);
  const double step = 1.0 / (2.0 * eig.eigenvalues().maxCoeff());
  std::vector<double> x = project_to_simplex(start);
  std::vector<double> y = x;
  double t = 1.0;
  std::vector<double> trial(n);
  for (int k = 0; k < iterations; ++k) {
    const Eigen::Map<const Eigen::VectorXd> ym(y.data(), n);
    const Eigen::VectorXd grad = 2.0 * (m.entries * ym);
    for (Eigen::Index i = 0; i < n; ++i) trial[i] = y[i] - step * grad(i);
    std::vector<double> next = project_to_simplex(trial);
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    for (Eigen::Index i = 0; i < n; ++i) y[i] = next[i] + (t - 1.0) / tn * (next[i] - x[i]);
    // restart momentum when the energy goes up
    if (energy(m, next) > energy(m, x)) {
      y = next;
      t = 1.0;
    } else {
      t = tn;
    }
    x = std::move(next);
  }
  if (value) *value = energy(m, x);
  return x;
}

EquilibriumResult capacity(const SetSpec& set, const KernelSpec& spec, EnergyFlavor flavor, int mesh,
                           double tol, long max_iter) {
  const CellComplex cx = discretize(set, spec, mesh);
  const EnergyMatrix m = build_energy_matrix(cx, spec, flavor);
  std::vector<double> start;
  for (const auto& c : cx.cells) start.push_back(c.mass);
  EquilibriumResult r = equilibrium(m, tol, max_iter, start);
  r.mesh = mesh;
  return r;
}

nlohmann::json to_json(const EquilibriumResult& r) {
  return {{"capacity", r.capacity()},  {"capacitySqrt", std::sqrt(r.capacity())},
          {"energyMin", r.energy_min}, {"gap", r.fw_gap},
          {"mesh", r.mesh},            {"iterations", r.iterations},
          {"certified", r.certified}};
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// boundary grid for the off-support scan
std::vector<BoundaryPoint> boundary_grid(const CellComplex& cx) {
  std::vector<BoundaryPoint> grid;
  if (cx.d == 1) {
    for (int k = 0; k < 4096; ++k) grid.push_back(BoundaryPoint::on_circle(2.0 * kPi * (k + 0.5) / 4096));
    return grid;
  }
  const auto rule = make_quadrature(cx.d, cx.d == 2 ? 12 : 4);
  return rule.nodes;
}

}  // namespace

PotentialCheck equilibrium_potential_check(const EquilibriumResult& result, const CellComplex& cx,
                                           const KernelSpec& spec, double tol) {
  if (result.weights.size() != cx.size()) throw DomainError("result does not match the complex");
  PotentialCheck c;
  c.tolerance = tol;
  c.energy_min = result.energy_min;
  const CellPotential pot(cx, spec.a);
  auto smeared = [&](auto&& eval) {
    double s = 0.0;
    for (std::size_t j = 0; j < cx.size(); ++j) {
      if (result.weights[j] > 0.0) s += result.weights[j] * eval(j);
    }
    return s;
  };
  std::vector<double> support;
  for (std::size_t i = 0; i < cx.size(); ++i) {
    if (cx.layout == CellLayout::Rings) {
      support.push_back(smeared([&](std::size_t j) { return pot.at_ring(j, cx.cells[i].ring_x); }));
    } else {
      support.push_back(smeared([&](std::size_t j) { return pot(j, cx.cells[i].center); }));
    }
  }
  c.support_min = *std::min_element(support.begin(), support.end());
  c.support_max = *std::max_element(support.begin(), support.end());
  c.support_median = median(support);
  c.grid_max = 0.0;
  if (cx.layout == CellLayout::Rings) {
    // the potential depends on <z, axis> only: scan a polar grid of the disk
    for (int i = 0; i <= 32; ++i) {
      for (int k = 0; k < 64; ++k) {
        const cplx x = std::polar(i / 32.0 * (1.0 - 1e-9), 2.0 * kPi * k / 64);
        c.grid_max = std::max(c.grid_max, smeared([&](std::size_t j) { return pot.at_ring(j, x); }));
      }
    }
  } else {
    for (const auto& z : boundary_grid(cx)) {
      c.grid_max = std::max(c.grid_max, smeared([&](std::size_t j) { return pot(j, z); }));
    }
  }
  c.frostman_ok = c.support_min >= (1.0 - tol) * result.energy_min &&
                  c.grid_max <= (1.0 + tol) * c.support_max;

  // holomorphic potential of the capacity-normalized atoms
  AtomicMeasure mu;
  for (std::size_t j = 0; j < cx.size(); ++j) {
    if (result.weights[j] > 0.0) mu.atoms.push_back({cx.cells[j].center, result.weights[j] / result.energy_min});
  }
  std::vector<BoundaryPoint> directions;
  if (cx.layout == CellLayout::Arcs) {
    // midpoints between neighbouring cells of the same arc
    for (std::size_t j = 0; j + 1 < cx.size(); ++j) {
      const double a0 = std::arg(cx.cells[j].center[0]);
      const double a1 = std::arg(cx.cells[j + 1].center[0]);
      double step = std::remainder(a1 - a0, 2.0 * kPi);
      if (std::abs(std::abs(step) - 0.5 * (cx.cells[j].arc_length + cx.cells[j + 1].arc_length)) < 1e-9) {
        directions.push_back(BoundaryPoint::on_circle(a0 + 0.5 * step));
      }
    }
  }
  if (directions.empty()) {
    for (const auto& cell : cx.cells) directions.push_back(cell.center);
  }
  std::vector<double> floors;
  for (const auto& z : directions) {
    std::vector<cplx> x = z.coords();
    for (auto& v : x) v *= c.probe_radius;
    floors.push_back(holo_potential(spec, mu, x).real());
  }
  c.radial_floor_min = *std::min_element(floors.begin(), floors.end());
  c.radial_floor_median = median(floors);
  const double normalized_median = c.support_median / result.energy_min;
  c.floor_fraction_below =
      static_cast<double>(std::count_if(floors.begin(), floors.end(),
                                        [&](double f) { return f < 0.5 * normalized_median; })) /
      floors.size();
  for (const auto& z : boundary_grid(cx)) {
    for (double r : {0.5, 0.9, 0.99}) {
      std::vector<cplx> x = z.coords();
      for (auto& v : x) v *= r;
      c.interior_sup_abs = std::max(c.interior_sup_abs, std::abs(holo_potential(spec, mu, x)));
    }
  }
  return c;
}

nlohmann::json to_json(const PotentialCheck& c) {
  return {{"supportMin", c.support_min},
          {"supportMedian", c.support_median},
          {"supportMax", c.support_max},
          {"gridMax", c.grid_max},
          {"energyMin", c.energy_min},
          {"probeRadius", c.probe_radius},
          {"radialFloorMin", c.radial_floor_min},
          {"radialFloorMedian", c.radial_floor_median},
          {"floorFractionBelow", c.floor_fraction_below},
          {"interiorSupAbs", c.interior_sup_abs},
          {"frostmanOk", c.frostman_ok},
          {"tolerance", c.tolerance}};
}

}  // namespace capball
