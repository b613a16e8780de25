#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "capball/kernels.hpp"
#include "capball/numerics.hpp"
#include "capball/sphere.hpp"

namespace capball {

enum class SetKind { Arc, Cap, Union, Cantor };

/// A compact subset of the sphere of C^d.
///   arc(theta0, theta1)             d = 1, theta0 < theta1 <= theta0 + 2 pi
///   cap(center, delta)              Koranyi cap {d(z, center) <= delta}, 0 < delta <= sqrt 2
///   union(members)                  members share one dimension
///   cantor(theta0, theta1, ratios, depth)
///       d = 1. Each step keeps the two outer pieces of relative length r_n
///       (r_n = l_n / l_{n-1}, 0 < r_n <= 1/2); the last ratio repeats when
///       depth exceeds the schedule. depth 0 is the base arc.
struct SetSpec {
  SetKind kind = SetKind::Arc;
  double theta0 = 0.0;
  double theta1 = 0.0;
  std::optional<BoundaryPoint> center;
  double delta = 0.0;
  std::vector<SetSpec> members;
  std::vector<double> ratios;
  int depth = 0;

  static SetSpec arc(double theta0, double theta1);
  static SetSpec full_circle() { return arc(0.0, 2.0 * 3.14159265358979323846); }
  static SetSpec cap(BoundaryPoint center, double delta);
  static SetSpec union_of(std::vector<SetSpec> members);
  static SetSpec cantor(double theta0, double theta1, std::vector<double> ratios, int depth);

  int dimension() const;
  /// Throws ConstructionError on an invalid or degenerate description.
  void validate() const;
};

nlohmann::json to_json(const SetSpec& set);
SetSpec set_from_json(const nlohmann::json& j);
/// Compact text form used by the CLI: "arc:t0:t1", "cap:re:im[:re:im...]:delta",
/// "cantor:t0:t1:depth:r1[:r2...]", members joined with '+' for unions.
SetSpec parse_set(const std::string& text);

/// Membership with a 1e-12 tolerance on arc endpoints and cap boundaries.
bool set_contains(const SetSpec& set, const BoundaryPoint& z);

/// Disjoint arcs (start, length) covering a d = 1 set, sorted by start in
/// [0, 2 pi). Overlapping union members are merged.
std::vector<std::pair<double, double>> circle_arcs(const SetSpec& set);

struct Cell {
  BoundaryPoint center;
  double mass = 0.0;
  double diameter = 0.0;  // Koranyi
  double arc_length = 0.0;  // d = 1 cells only
  cplx ring_x{0.0, 0.0};    // ring cells only: <center, axis>
};

/// How cells are shaped.
///   Arcs      d = 1 subarcs.
///   Rings     d = 2 Koranyi cap about `axis`: each cell is every point whose
///             inner product with the axis lies in a patch of the unit disk,
///             so measures on it are invariant under rotations fixing the
///             axis. Kernels between cells are averaged over that rotation.
///   Clusters  blocks of quadrature nodes (any other d >= 2 set).
enum class CellLayout { Arcs, Rings, Clusters };

struct CellComplex {
  int d = 1;
  CellLayout layout = CellLayout::Arcs;
  KernelSpec spec;
  std::vector<Cell> cells;
  /// Cell-averaged |K_a| on the diagonal.
  std::vector<double> self_interaction;
  std::optional<BoundaryPoint> axis;  // Rings
  /// Clusters: member nodes and weights per cell, kept for sub-cell averages.
  std::vector<std::vector<BoundaryPoint>> members;
  std::vector<std::vector<double>> member_weights;
  /// Rings: patch description per cell (theta range, t^2 range).
  std::vector<std::array<double, 4>> patches;
  double cap_delta = 0.0;

  std::size_t size() const { return cells.size(); }
  double total_mass() const;
};

inline constexpr int kMaxMesh = 1 << 16;

/// Cover the set by at most `mesh` cells. d = 1: subarcs with exact masses,
/// distributed over the disjoint arcs in proportion to length (at least one
/// each). d = 2 single caps: ring cells with exact masses. Other d >= 2 sets:
/// quadrature-node clusters. Self-interaction is the cell average of |K_a|.
CellComplex discretize(const SetSpec& set, const KernelSpec& spec, int mesh);

/// Cell-averaged kernel value of a d = 1 subarc of length h under
/// riesz_from_gap(1, index, .): int_0^h k(2 sin(u/2)) 2 (h - u) / h^2 du.
double arc_self_average(double index, double h);

/// d = 2 |K_a| between points whose inner products with a fixed axis are x
/// and y, averaged over the rotations fixing the axis:
///   mean_beta k(|C - B e^{i beta}|), C = |1 - x conj(y)|,
///   B = sqrt((1 - |x|^2)(1 - |y|^2)), C^2 - B^2 = |x - y|^2,
/// which is C^{-a} 2F1(a/2, a/2; 1; B^2/C^2), or 1 - log C when a = 0.
class RingKernel {
 public:
  explicit RingKernel(double a);
  double operator()(cplx x, cplx y) const;
  /// Same from B and |x - y|^2, for callers that know the gap accurately.
  double from_parts(double b, double gap2) const;

 private:
  double a_;
  numerics::Hyp2F1Unit hyp_;
};

nlohmann::json to_json(const CellComplex& complex);

}  // namespace capball
