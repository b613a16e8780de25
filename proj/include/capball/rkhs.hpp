#pragma once

#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "capball/kernels.hpp"
#include "capball/measures.hpp"

namespace capball {

/// mu^(n) = sum_j w_j conj(zeta_j)^n for n = 0..N.
struct MomentSequence {
  std::vector<cplx> moments;
};

/// d = 1 only (UnsupportedDimension otherwise); the empty measure gives zeros.
MomentSequence moments(const AtomicMeasure& mu, int N);

/// Taylor coefficients c_0..c_N of a function in the space with kernel
/// weights `space` (norm^2 = sum |c_n|^2 / a_n).
struct CoefficientFunction {
  std::vector<cplx> taylor;
  SeriesCoefficients space;

  /// Throws DomainError unless the weights are positive and cover the coefficients.
  void validate() const;
  cplx operator()(cplx z) const;
  std::size_t degree_bound() const { return taylor.empty() ? 0 : taylor.size() - 1; }
};

/// Coefficient function over the D_a weights of spec.a.
CoefficientFunction coefficient_function(const KernelSpec& spec, std::vector<cplx> taylor);

/// c_n = a_n mu^(n), n = 0..N.
CoefficientFunction potential_coefficients(const KernelSpec& spec, const AtomicMeasure& mu, int N);

double norm_squared(const CoefficientFunction& f);
/// <f, g> = sum f_n conj(g_n) / a_n over the common length.
cplx inner_product(const CoefficientFunction& f, const CoefficientFunction& g);

struct PairingResult {
  cplx integral;     // sum_j w_j g(zeta_j)
  cplx inner;        // <g, f_mu> = sum g_n conj(mu^(n))
  double discrepancy = 0.0;
};

/// rho_mu(g) on both paths. g must have degree <= N (DomainError otherwise).
PairingResult pairing(const CoefficientFunction& g, const AtomicMeasure& mu, int N);

struct EnergyIdentityReport {
  double coefficient_path = 0.0;  // sum a_n r^{2n} |mu^(n)|^2
  double double_sum_path = 0.0;   // sum_jk w_j w_k Re K_a(r zeta_j, r zeta_k)
  double discrepancy = 0.0;
  double tail = 0.0;
  int truncation = 0;
  double r = 0.0;
  bool passed = false;
};

/// ||(f_mu)_r||^2 on both paths. Needs d = 1, 0 <= r < 1 and 0 <= a <= 1;
/// throws ToleranceNotMet when the tail bound M^2 r^{2N+2} / (1 - r^2) exceeds tol.
EnergyIdentityReport energy_identity_check(const KernelSpec& spec, const AtomicMeasure& mu, double r,
                                           int N = kDefaultTruncation, double tol = 1e-10);

/// Largest singular value of the M x M section of multiplication by phi in the
/// orthonormal basis e_n = z^n sqrt(a_n): entry (m, n) = phi_{m-n} sqrt(a_n / a_m).
/// Needs M <= number of coefficients of phi.
double multiplier_norm_section(const CoefficientFunction& phi, int M);

/// V_phi(z) = 2 <phi, K_a(., z) phi> - ||phi||^2 from the coefficients
/// (exact for the truncated phi).
cplx sarason_coefficients(const CoefficientFunction& phi, cplx z);

/// max of Re V_phi over radii {0.5, 0.9, 0.99} x `angles` equispaced angles.
double sarason_grid_max(const CoefficientFunction& phi, int angles = 1024);
/// max |phi| over `angles` equispaced boundary points.
double sup_norm_grid(const CoefficientFunction& phi, int angles = 4096);

nlohmann::json to_json(const PairingResult& r);
nlohmann::json to_json(const EnergyIdentityReport& r);

}  // namespace capball
