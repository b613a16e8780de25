#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "capball/kernels.hpp"
#include "capball/sets.hpp"
#include "capball/sphere.hpp"

namespace capball {

/// Da: |K_a| between cells. Bessel: the L^2(sigma) Gram matrix of cell-averaged
/// Riesz potentials I_s, i.e. the iterated kernel G_s averaged over cell pairs.
enum class EnergyFlavor { Da, Bessel };

std::string to_string(EnergyFlavor flavor);
/// "da" or "bessel"; anything else is a ConfigError.
EnergyFlavor parse_flavor(const std::string& name);

/// Kernel averaged over one cell: gap^{-p}, or 1 - log gap when p == 0.
/// Arcs integrate exactly in the offset, rings subdivide the patch toward the
/// evaluation point, clusters average over member nodes (skipping a
/// coincident member).
class CellPotential {
 public:
  CellPotential(const CellComplex& cx, double exponent);
  double operator()(std::size_t cell, const BoundaryPoint& z) const;
  /// Rings only: the value at any point with <z, axis> = x.
  double at_ring(std::size_t cell, cplx x) const;
  double exponent() const { return p_; }

 private:
  double arc_average(std::size_t cell, double phi) const;
  double arc_antiderivative(double x) const;
  double arc_primitive(double x) const;

  const CellComplex* cx_;
  double p_;
  double f_pi_ = 0.0;
};

struct EnergyMatrix {
  Eigen::MatrixXd entries;
  EnergyFlavor flavor = EnergyFlavor::Da;

  std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
  /// Throws ConstructionError unless square, symmetric within 1e-14 relative
  /// and entrywise positive and finite.
  void validate() const;
  /// Kernel multiplied by lambda > 0.
  EnergyMatrix scaled(double lambda) const;
};

/// Minimum quadrature nodes per cell accepted for the Bessel flavor.
inline constexpr std::size_t kBesselNodesPerCell = 16;

/// Da flavor: off-diagonal |K_a| at cell centers (ring means for ring cells),
/// diagonal the cell self-interaction; `rule` is unused. Bessel flavor:
/// supported for arc and ring cells; `rule` must match the dimension and have
/// at least kBesselNodesPerCell nodes per cell (ConfigError otherwise); its
/// size sets the Gauss order of the L^2 quadrature.
EnergyMatrix build_energy_matrix(const CellComplex& cx, const KernelSpec& spec,
                                 EnergyFlavor flavor, const QuadratureRule& rule);
EnergyMatrix build_energy_matrix(const CellComplex& cx, const KernelSpec& spec,
                                 EnergyFlavor flavor);

/// Default rule for the Bessel flavor on a complex.
QuadratureRule default_bessel_rule(const CellComplex& cx);

/// w^T M w.
double energy(const EnergyMatrix& m, std::span<const double> weights);

struct EquilibriumResult {
  std::vector<double> weights;
  double energy_min = 0.0;      // best energy found (upper end of the bracket)
  double energy_lower = 0.0;    // certified lower end
  double fw_gap = 0.0;          // energy_min - energy_lower
  double capacity_lower = 0.0;  // 1 / energy_min
  double capacity_upper = 0.0;  // 1 / energy_lower
  long iterations = 0;
  bool certified = false;
  int mesh = 0;
  std::vector<double> gap_history;  // bracket width at checkpoints

  double capacity() const { return 1.0 / energy_min; }
};

inline constexpr double kDefaultTol = 1e-9;
inline constexpr long kDefaultMaxIter = 2'000'000;

/// Pairwise Frank-Wolfe on the probability simplex with exact line search.
/// Stops when the bracket width relative to the energy is <= tol; otherwise
/// returns uncertified after max_iter steps. `start` defaults to uniform.
EquilibriumResult equilibrium(const EnergyMatrix& m, double tol = kDefaultTol,
                              long max_iter = kDefaultMaxIter,
                              std::span<const double> start = {});

/// Independent check: accelerated projected gradient from `start`.
/// Returns the final weights; `value` receives their energy.
std::vector<double> projected_gradient_minimum(const EnergyMatrix& m, std::vector<double> start,
                                               int iterations, double* value);

/// Euclidean projection onto the probability simplex.
std::vector<double> project_to_simplex(std::span<const double> v);

/// discretize -> build -> equilibrium, started from the cell masses.
EquilibriumResult capacity(const SetSpec& set, const KernelSpec& spec, EnergyFlavor flavor,
                           int mesh, double tol = kDefaultTol, long max_iter = kDefaultMaxIter);

/// {capacity, capacitySqrt, energyMin, gap, mesh, iterations, certified}
nlohmann::json to_json(const EquilibriumResult& r);

struct PotentialCheck {
  // D_a potential of the probability equilibrium measure, cell-smeared
  double support_min = 0.0;
  double support_median = 0.0;
  double support_max = 0.0;
  double grid_max = 0.0;  // over a boundary grid
  double energy_min = 0.0;
  // holomorphic potential of the capacity-normalized atoms at r = probe_radius
  double probe_radius = 0.999;
  double radial_floor_min = 0.0;
  double radial_floor_median = 0.0;
  double floor_fraction_below = 0.0;  // directions with Re f < 1/2 support median
  double interior_sup_abs = 0.0;      // over radii {0.5, 0.9, 0.99}
  bool frostman_ok = false;
  double tolerance = 0.0;
};

/// Evaluates the Frostman pattern: smeared potential >= (1 - tol) E_min on
/// the support cells and <= (1 + tol) max over support on the grid. Floors
/// below threshold are allowed for up to 1% of directions.
PotentialCheck equilibrium_potential_check(const EquilibriumResult& result, const CellComplex& cx,
                                           const KernelSpec& spec, double tol = 0.05);

nlohmann::json to_json(const PotentialCheck& c);

}  // namespace capball
