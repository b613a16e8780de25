#include "capball/rkhs.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "capball/errors.hpp"
#include "capball/numerics.hpp"

namespace capball {

using numerics::kPi;

MomentSequence moments(const AtomicMeasure& mu, int N) {
  if (N < 0) throw DomainError("moment count must be nonnegative");
  if (mu.dimension() > 1) throw UnsupportedDimension(mu.dimension());
  MomentSequence m;
  m.moments.assign(N + 1, 0.0);
  for (const auto& at : mu.atoms) {
    // phases from the angle avoid drift in repeated products
    const double theta = std::arg(at.point[0]);
    for (int n = 0; n <= N; ++n) m.moments[n] += at.weight * std::polar(1.0, -n * theta);
  }
  return m;
}

void CoefficientFunction::validate() const {
  if (space.size() < taylor.size()) throw DomainError("kernel weights shorter than the coefficients");
  for (std::size_t n = 0; n < space.size(); ++n) {
    if (!(space[n] > 0.0)) throw DomainError("kernel weights must be positive");
  }
}

cplx CoefficientFunction::operator()(cplx z) const {
  cplx s = 0.0;
  for (std::size_t n = taylor.size(); n-- > 0;) s = s * z + taylor[n];
  return s;
}

CoefficientFunction coefficient_function(const KernelSpec& spec, std::vector<cplx> taylor) {
  CoefficientFunction f;
  const int N = std::max<int>(1, static_cast<int>(taylor.size()) - 1);
  f.space = series_coefficients_da(spec.a, N);
  f.taylor = std::move(taylor);
  f.validate();
  return f;
}

CoefficientFunction potential_coefficients(const KernelSpec& spec, const AtomicMeasure& mu, int N) {
  if (spec.d != 1) throw UnsupportedDimension(spec.d);
  const auto m = moments(mu, N);
  CoefficientFunction f;
  f.space = series_coefficients_da(spec.a, std::max(N, 1));
  f.taylor.resize(N + 1);
  for (int n = 0; n <= N; ++n) f.taylor[n] = f.space[n] * m.moments[n];
  return f;
}

double norm_squared(const CoefficientFunction& f) {
  f.validate();
  numerics::CompensatedSum s;
  for (std::size_t n = 0; n < f.taylor.size(); ++n) s.add(std::norm(f.taylor[n]) / f.space[n]);
  return s.value();
}

cplx inner_product(const CoefficientFunction& f, const CoefficientFunction& g) {
  f.validate();
  g.validate();
  const std::size_t n = std::min(f.taylor.size(), g.taylor.size());
  cplx s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += f.taylor[k] * std::conj(g.taylor[k]) / f.space[k];
  return s;
}

PairingResult pairing(const CoefficientFunction& g, const AtomicMeasure& mu, int N) {
  if (mu.dimension() > 1) throw UnsupportedDimension(mu.dimension());
  if (g.degree_bound() > static_cast<std::size_t>(N)) {
    throw DomainError("pairing needs a polynomial of degree at most N");
  }
  g.validate();
  PairingResult r;
  for (const auto& at : mu.atoms) r.integral += at.weight * g(at.point[0]);
  const auto m = moments(mu, N);
  for (std::size_t n = 0; n < g.taylor.size(); ++n) r.inner += g.taylor[n] * std::conj(m.moments[n]);
  r.discrepancy = std::abs(r.integral - r.inner);
  return r;
}

EnergyIdentityReport energy_identity_check(const KernelSpec& spec, const AtomicMeasure& mu, double r,
                                           int N, double tol) {
  if (spec.d != 1 || mu.dimension() > 1) throw UnsupportedDimension(std::max(spec.d, mu.dimension()));
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("dilation radius must lie in [0, 1)");
  if (!(spec.a >= 0.0 && spec.a <= 1.0)) throw DomainError("energy identity check needs 0 <= a <= 1");
  if (N < 1) throw DomainError("truncation must be at least 1");
  EnergyIdentityReport rep;
  rep.r = r;
  rep.truncation = N;
  const double mass = mu.total_mass();
  rep.tail = r == 0.0 ? 0.0 : mass * mass * std::pow(r, 2 * N + 2) / (1.0 - r * r);
  if (rep.tail > tol) throw ToleranceNotMet("energy identity truncated too early", rep.tail);

  const auto a = series_coefficients_da(spec.a, N);
  const auto m = moments(mu, N);
  numerics::CompensatedSum coef;
  double r2n = 1.0;
  for (int n = 0; n <= N; ++n) {
    coef.add(a[n] * r2n * std::norm(m.moments[n]));
    r2n *= r * r;
  }
  rep.coefficient_path = coef.value();

  numerics::CompensatedSum dbl;
  for (const auto& x : mu.atoms) {
    for (const auto& y : mu.atoms) {
      const cplx t = r * r * x.point[0] * std::conj(y.point[0]);
      dbl.add(x.weight * y.weight * holo_kernel_of_inner(spec.a, t).real());
    }
  }
  rep.double_sum_path = dbl.value();
  rep.discrepancy = std::abs(rep.coefficient_path - rep.double_sum_path);
  rep.passed = rep.discrepancy <= tol * std::max(1.0, std::abs(rep.double_sum_path)) + rep.tail;
  return rep;
}

double multiplier_norm_section(const CoefficientFunction& phi, int M) {
  phi.validate();
  if (M < 1 || static_cast<std::size_t>(M) > phi.taylor.size()) {
    throw DomainError("section size must lie between 1 and the number of coefficients");
  }
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(M, M);
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n <= m; ++n) t(m, n) = phi.taylor[m - n] * std::sqrt(phi.space[n] / phi.space[m]);
  }
  const Eigen::BDCSVD<Eigen::MatrixXcd> svd(t);
  return svd.singularValues()(0);
}

namespace {

// V_phi(z) = 2 sum_m a_m A_m z^m - ||phi||^2 with A_m = sum_{n>=m} phi_n conj(phi_{n-m}) / a_n
struct SarasonPolynomial {
  std::vector<cplx> coeffs;
  double norm2 = 0.0;

  explicit SarasonPolynomial(const CoefficientFunction& phi) {
    phi.validate();
    const std::size_t len = phi.taylor.size();
    coeffs.assign(len, 0.0);
    for (std::size_t m = 0; m < len; ++m) {
      cplx s = 0.0;
      for (std::size_t n = m; n < len; ++n) s += phi.taylor[n] * std::conj(phi.taylor[n - m]) / phi.space[n];
      coeffs[m] = 2.0 * phi.space[m] * s;
    }
    norm2 = norm_squared(phi);
  }

  cplx operator()(cplx z) const {
    cplx s = 0.0;
    for (std::size_t n = coeffs.size(); n-- > 0;) s = s * z + coeffs[n];
    return s - norm2;
  }
};

}  // namespace

cplx sarason_coefficients(const CoefficientFunction& phi, cplx z) {
  if (!(std::norm(z) < 1.0)) throw DomainError("Sarason function needs |z| < 1");
  return SarasonPolynomial(phi)(z);
}

double sarason_grid_max(const CoefficientFunction& phi, int angles) {
  const SarasonPolynomial v(phi);
  double best = -1e300;
  for (double r : {0.5, 0.9, 0.99}) {
    for (int k = 0; k < angles; ++k) best = std::max(best, v(std::polar(r, 2.0 * kPi * k / angles)).real());
  }
  return best;
}

double sup_norm_grid(const CoefficientFunction& phi, int angles) {
  double best = 0.0;
  for (int k = 0; k < angles; ++k) best = std::max(best, std::abs(phi(std::polar(1.0, 2.0 * kPi * k / angles))));
  return best;
}

nlohmann::json to_json(const PairingResult& r) {
  return {{"integral", {r.integral.real(), r.integral.imag()}},
          {"inner", {r.inner.real(), r.inner.imag()}},
          {"discrepancy", r.discrepancy}};
}

nlohmann::json to_json(const EnergyIdentityReport& r) {
  return {{"coefficientPath", r.coefficient_path},
          {"doubleSumPath", r.double_sum_path},
          {"discrepancy", r.discrepancy},
          {"tail", r.tail},
          {"truncation", r.truncation},
          {"r", r.r},
          {"passed", r.passed}};
}

}  // namespace capball
