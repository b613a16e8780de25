#pragma once

#include <string>
#include <vector>

#include "capball/sphere.hpp"

namespace capball {

/// Parameters (d, s, a) with a = d - 2s. The holomorphic kernel is
/// logarithmic exactly when a == 0.
struct KernelSpec {
  int d = 1;
  double s = 0.5;
  double a = 0.0;

  static KernelSpec from_s(int d, double s);
  static KernelSpec from_a(int d, double a);

  bool log_branch() const { return a == 0.0; }
  /// Throws DomainError unless (d-1)/2 < s <= d/2, i.e. a in [0, 1).
  void require_capacity_range() const;
};

/// Riesz kernel of index `index` evaluated from the gap |1 - <z,w>|:
/// gap^{-(d-index)}, or log(e/gap) when index == d. +infinity at gap 0
/// on the power branch.
double riesz_from_gap(int d, double index, double gap);

/// Non-isotropic Riesz kernel k_s at index spec.s.
double riesz_kernel(const KernelSpec& spec, const BoundaryPoint& z, const BoundaryPoint& w);
/// Same with an explicit index, for iterated-kernel work.
double riesz_kernel(int d, double index, const BoundaryPoint& z, const BoundaryPoint& w);

/// |K_a(z,w)| realized as the Riesz kernel of index 2s.
double da_kernel_abs(const KernelSpec& spec, const BoundaryPoint& z, const BoundaryPoint& w);
double da_kernel_abs_from_gap(const KernelSpec& spec, double gap);

/// K_a(z, w) = (1 - <z,w>)^{-a}, or log(e / (1 - <z,w>)) for a = 0, on the
/// principal branch. Throws DomainError when <z,w> = 1.
cplx holo_kernel(const KernelSpec& spec, std::span<const cplx> z, std::span<const cplx> w);
/// K_a as a function of t = <z,w>.
cplx holo_kernel_of_inner(double a, cplx t);

/// Power-series weights a_0..a_N of a unitarily invariant kernel.
struct SeriesCoefficients {
  std::vector<double> values;
  std::string space;  // e.g. "D_a", "D_0-modified", "H_s"
  double parameter = 0.0;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t n) const { return values[n]; }
};

inline constexpr int kDefaultTruncation = 512;

/// Coefficients of (1 - t)^{-a} (a > 0) or log(e / (1 - t)) (a = 0).
SeriesCoefficients series_coefficients_da(double a, int N);
/// a_n = 1/(n+1): the equivalent-norm kernel (1/t) log(1/(1-t)) used for a = 0.
SeriesCoefficients series_coefficients_modified_log(int N);
/// a_n = ||z_1^n||_{H_s}^{-2} = 1 / ((n+1)^{2s} n!(d-1)!/(n+d-1)!).
SeriesCoefficients series_coefficients_hs(int d, double s, int N);

/// b_1..b_N of sum b_n t^n = 1 - 1 / sum a_n t^n (entry 0 of the result is b_1).
std::vector<double> pick_coefficients(const SeriesCoefficients& coeffs, int N);
/// Inverse of pick_coefficients: a_0..a_N from b_1..b_N.
std::vector<double> coefficients_from_pick(const std::vector<double>& b);

struct RegularityReport {
  std::vector<double> ratios;   // a_n / a_{n+1}
  int first_within_1e2 = -1;    // first n after which |ratio - 1| <= 1e-2 stays true
  bool ratio_window_ok = false; // ratio in [0.5, 2] for all n >= 10
};
RegularityReport regularity(const SeriesCoefficients& coeffs);

/// Iterated kernel G_s(z,w) = int k_s(z,zeta) k_s(zeta,w) dsigma(zeta).
/// Supported for d in {1, 2} and 0 < s <= d. The rule fixes the dimension and
/// resolution; the integral itself uses panels graded toward both
/// singularities. Throws DomainError on the diagonal.
double iterated_kernel(const KernelSpec& spec, const BoundaryPoint& z, const BoundaryPoint& w,
                       const QuadratureRule& rule);

/// G_s as a function of t = <z,w> with an explicit Gauss order per panel.
double iterated_kernel_of_inner(int d, double s, cplx t, int order);

/// Gauss order per panel implied by a rule's resolution.
int iterated_kernel_order(const QuadratureRule& rule);

}  // namespace capball
