#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "capball/kernels.hpp"
#include "capball/sets.hpp"
#include "capball/sphere.hpp"

namespace capball {

struct Atom {
  BoundaryPoint point;
  double weight = 0.0;
};

/// Finite positive measure on the sphere: weighted point masses.
struct AtomicMeasure {
  std::vector<Atom> atoms;
  std::optional<SetSpec> support;

  /// Throws ConstructionError on negative or non-finite weights, mixed
  /// dimensions, or repeated atoms.
  void validate() const;
  double total_mass() const;
  /// Dimension of the atoms; 0 for the empty measure.
  int dimension() const;

  static AtomicMeasure point_mass(const BoundaryPoint& w, double weight = 1.0);
  /// `n` equispaced atoms on the circle, total mass `mass`.
  static AtomicMeasure uniform_circle(int n, double mass = 1.0);
  /// Cell centers of a discretization carrying the given weights.
  static AtomicMeasure from_cells(const CellComplex& cx, std::span<const double> weights);
};

AtomicMeasure operator+(const AtomicMeasure& mu, const AtomicMeasure& nu);
AtomicMeasure operator*(double c, const AtomicMeasure& mu);

nlohmann::json to_json(const AtomicMeasure& mu);
AtomicMeasure measure_from_json(const nlohmann::json& j);

/// I_s(mu)(z) = sum w k_s(z, atom). +infinity when z sits on an atom
/// (power branch). Zero-weight atoms are skipped.
double riesz_potential(const KernelSpec& spec, const AtomicMeasure& mu, const BoundaryPoint& z);
/// Same with |K_a| in place of k_s.
double da_potential(const KernelSpec& spec, const AtomicMeasure& mu, const BoundaryPoint& z);

/// f_mu(z) = sum w K_a(z, atom) for |z| < 1; DomainError otherwise.
cplx holo_potential(const KernelSpec& spec, const AtomicMeasure& mu, std::span<const cplx> z);

/// z -> f_mu(r z).
class Dilation {
 public:
  Dilation(KernelSpec spec, AtomicMeasure mu, double r);
  cplx operator()(std::span<const cplx> z) const;
  /// dilate(dilate(f, r), r') = dilate(f, r r').
  Dilation dilate(double r) const { return Dilation(spec_, mu_, r_ * r); }
  double radius() const { return r_; }
  const AtomicMeasure& measure() const { return mu_; }

 private:
  KernelSpec spec_;
  AtomicMeasure mu_;
  double r_;
};

Dilation dilate(const KernelSpec& spec, const AtomicMeasure& mu, double r);

struct SarasonValue {
  cplx value;
  double norm_squared = 0.0;  // ||f_r||^2
  double tail = 0.0;          // a-posteriori truncation bound, 0 for the double sum
  int truncation = 0;
  std::string path;           // "coefficients" or "double-sum"
};

/// V_f(z) = 2 <f, K_a(., z) f> - ||f||^2 for f = f_mu dilated by r < 1.
/// d = 1 uses Taylor coefficients truncated at N and throws ToleranceNotMet
/// when the tail bound exceeds `tol`; other d use the double sum over atoms.
/// Needs 0 <= a <= 1 and |z| < 1.
SarasonValue sarason_function(const KernelSpec& spec, const AtomicMeasure& mu, double r,
                              std::span<const cplx> z, int N = kDefaultTruncation,
                              double tol = 1e-10);
/// The double-sum evaluation for any d (exact, no truncation).
SarasonValue sarason_function_direct(const KernelSpec& spec, const AtomicMeasure& mu, double r,
                                     std::span<const cplx> z);

inline constexpr double kDefaultProbeStop = 1.0 - 1e-4;

/// 0 followed by n - 1 radii 1 - 10^{-k log10(1/(1-stop))/(n-1)}, ending at `stop`.
std::vector<double> default_probe_radii(int n = 41, double stop = kDefaultProbeStop);

/// f_mu(r zeta) along the ray. Radii must increase strictly within [0, 1).
std::vector<cplx> radial_probe(const KernelSpec& spec, const AtomicMeasure& mu,
                               const BoundaryPoint& zeta, std::span<const double> radii);

/// CSV with header "r,re,im,abs", 17 significant digits.
std::string probe_csv(std::span<const double> radii, std::span<const cplx> values);

}  // namespace capball
