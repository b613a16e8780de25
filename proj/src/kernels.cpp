#include "capball/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "capball/errors.hpp"
#include "capball/numerics.hpp"

namespace capball {

using numerics::kPi;

KernelSpec KernelSpec::from_s(int d, double s) {
  if (d < 1) throw DomainError("dimension must be positive");
  if (!std::isfinite(s)) throw DomainError("s must be finite");
  return {d, s, d - 2.0 * s};
}

KernelSpec KernelSpec::from_a(int d, double a) {
  if (d < 1) throw DomainError("dimension must be positive");
  if (!std::isfinite(a)) throw DomainError("a must be finite");
  return {d, 0.5 * (d - a), a};
}

void KernelSpec::require_capacity_range() const {
  if (!(a >= 0.0 && a < 1.0)) {
    throw DomainError("capacity work needs (d-1)/2 < s <= d/2, i.e. 0 <= a < 1");
  }
}

double riesz_from_gap(int d, double index, double gap) {
  if (index == static_cast<double>(d)) {
    if (gap <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 - std::log(gap);
  }
  const double exponent = d - index;
  if (gap <= 0.0) return exponent > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return std::pow(gap, -exponent);
}

double riesz_kernel(int d, double index, const BoundaryPoint& z, const BoundaryPoint& w) {
  return riesz_from_gap(d, index, std::abs(1.0 - hermitian_inner(z, w)));
}

double riesz_kernel(const KernelSpec& spec, const BoundaryPoint& z, const BoundaryPoint& w) {
  return riesz_kernel(spec.d, spec.s, z, w);
}

double da_kernel_abs_from_gap(const KernelSpec& spec, double gap) {
  return riesz_from_gap(spec.d, 2.0 * spec.s, gap);
}

double da_kernel_abs(const KernelSpec& spec, const BoundaryPoint& z, const BoundaryPoint& w) {
  return riesz_kernel(spec.d, 2.0 * spec.s, z, w);
}

cplx holo_kernel_of_inner(double a, cplx t) {
  const cplx base = 1.0 - t;
  if (base == cplx(0.0, 0.0)) throw DomainError("holomorphic kernel is singular at <z,w> = 1");
  const cplx lg = std::log(base);  // principal branch; Re(1 - t) >= 0 on the closed ball
  if (a == 0.0) return 1.0 - lg;
  return std::exp(-a * lg);
}

cplx holo_kernel(const KernelSpec& spec, std::span<const cplx> z, std::span<const cplx> w) {
  if (z.size() != w.size()) throw DomainError("dimension mismatch in holomorphic kernel");
  return holo_kernel_of_inner(spec.a, hermitian_inner(z, w));
}

SeriesCoefficients series_coefficients_da(double a, int N) {
  if (N < 1) throw DomainError("truncation must be at least 1");
  if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("D_a weights need a >= 0");
  SeriesCoefficients c;
  c.space = "D_a";
  c.parameter = a;
  c.values.resize(N + 1);
  c.values[0] = 1.0;
  if (a == 0.0) {
    for (int n = 1; n <= N; ++n) c.values[n] = 1.0 / n;
  } else {
    for (int n = 1; n <= N; ++n) c.values[n] = c.values[n - 1] * (n - 1 + a) / n;
  }
  return c;
}

SeriesCoefficients series_coefficients_modified_log(int N) {
  if (N < 1) throw DomainError("truncation must be at least 1");
  SeriesCoefficients c;
  c.space = "D_0-modified";
  c.parameter = 0.0;
  c.values.resize(N + 1);
  for (int n = 0; n <= N; ++n) c.values[n] = 1.0 / (n + 1.0);
  return c;
}

SeriesCoefficients series_coefficients_hs(int d, double s, int N) {
  if (N < 1) throw DomainError("truncation must be at least 1");
  if (d < 1) throw DomainError("dimension must be positive");
  SeriesCoefficients c;
  c.space = "H_s";
  c.parameter = s;
  c.values.resize(N + 1);
  double hardy = 1.0;  // ||z_1^n||^2 in H^2(B_d) = n!(d-1)!/(n+d-1)!
  for (int n = 0; n <= N; ++n) {
    if (n > 0) hardy *= static_cast<double>(n) / (n + d - 1.0);
    c.values[n] = 1.0 / (std::pow(n + 1.0, 2.0 * s) * hardy);
  }
  return c;
}

std::vector<double> pick_coefficients(const SeriesCoefficients& coeffs, int N) {
  if (coeffs.size() < static_cast<std::size_t>(N) + 1) {
    throw DomainError("need a_0..a_N to compute b_1..b_N");
  }
  if (coeffs[0] != 1.0) throw DomainError("Pick recursion needs a_0 = 1");
  // c = 1 / sum a_n t^n
  std::vector<double> c(N + 1, 0.0);
  c[0] = 1.0;
  for (int n = 1; n <= N; ++n) {
    numerics::CompensatedSum acc;
    for (int k = 1; k <= n; ++k) acc.add(-coeffs[k] * c[n - k]);
    c[n] = acc.value();
  }
  std::vector<double> b(N);
  for (int n = 1; n <= N; ++n) b[n - 1] = -c[n];
  return b;
}

std::vector<double> coefficients_from_pick(const std::vector<double>& b) {
  // sum a_n t^n = 1 / (1 - sum b_n t^n)
  const int N = static_cast<int>(b.size());
  std::vector<double> a(N + 1, 0.0);
  a[0] = 1.0;
  for (int n = 1; n <= N; ++n) {
    numerics::CompensatedSum acc;
    for (int k = 1; k <= n; ++k) acc.add(b[k - 1] * a[n - k]);
    a[n] = acc.value();
  }
  return a;
}

RegularityReport regularity(const SeriesCoefficients& coeffs) {
  RegularityReport r;
  const std::size_t n_max = coeffs.size() - 1;
  r.ratios.reserve(n_max);
  for (std::size_t n = 0; n < n_max; ++n) r.ratios.push_back(coeffs[n] / coeffs[n + 1]);
  r.ratio_window_ok = true;
  for (std::size_t n = 10; n < r.ratios.size(); ++n) {
    if (r.ratios[n] < 0.5 || r.ratios[n] > 2.0) r.ratio_window_ok = false;
  }
  // ties such as a_n = 1/n at n = 100 (ratio exactly 1.01) are accepted up to
  // a few ulps of rounding in the quotient
  const double tol = 1e-2 * (1.0 + 8.0 * std::numeric_limits<double>::epsilon());
  int first = -1;
  for (int n = static_cast<int>(r.ratios.size()) - 1; n >= 0; --n) {
    if (std::abs(r.ratios[n] - 1.0) <= tol) {
      first = n;
    } else {
      break;
    }
  }
  r.first_within_1e2 = first;
  return r;
}

// ---------------------------------------------------------------------------
// iterated kernel

namespace {

// d = 1: G depends only on alpha = |arg t| in (0, pi]. Each of the two arcs
// between the singular points is split in half and integrated in offsets
// from its nearer singular endpoint.
double iterated_circle(double s, double alpha, int order) {
  const double p = 1.0 - s;  // kernel exponent d - s
  auto k = [&](double gap) { return riesz_from_gap(1, s, gap); };
  auto chord = [](double angle) { return std::abs(2.0 * std::sin(0.5 * angle)); };
  const double grading = (p > 0.0 && p < 1.0) ? std::max(4.0, 3.0 / (1.0 - p)) : 4.0;
  const double long_len = 2.0 * kPi - alpha;
  // the far singularity sits at distance ~ alpha from the long-arc halves
  const double inner_long = std::min(1e-3, 0.05 * alpha / long_len);
  numerics::CompensatedSum total;
  // short arc [0, alpha]: offsets from 0 and from alpha
  auto near_zero_short = [&](double u) { return k(chord(u)) * k(chord(alpha - u)); };
  total.add(numerics::integrate_singular_offset(near_zero_short, 0.5 * alpha, order, 1e-3, 0.25,
                                                grading));
  total.add(numerics::integrate_singular_offset(near_zero_short, 0.5 * alpha, order, 1e-3, 0.25,
                                                grading));
  // long arc [alpha, 2 pi]: offsets from alpha and from 2 pi
  auto near_alpha_long = [&](double u) { return k(chord(alpha + u)) * k(chord(u)); };
  total.add(numerics::integrate_singular_offset(near_alpha_long, 0.5 * long_len, order,
                                                inner_long, 0.25, grading));
  total.add(numerics::integrate_singular_offset(near_alpha_long, 0.5 * long_len, order,
                                                inner_long, 0.25, grading));
  return total.value() / (2.0 * kPi);
}

// Mean over beta of |C - B e^{i beta}|^{-p} (power) or log(e/|...|) (log
// branch) for C >= B >= 0, given B and gap2 = C^2 - B^2 so that the ratio
// B^2/C^2 keeps full relative accuracy in 1 - B^2/C^2.
struct CircleMean {
  double p;
  bool log_kernel;
  numerics::Hyp2F1Unit hyp;

  CircleMean(double p_, bool log_)
      : p(p_), log_kernel(log_), hyp(0.5 * p_, 0.5 * p_) {}

  double operator()(double b, double gap2) const {
    const double c2 = b * b + gap2;
    if (log_kernel) return 1.0 - 0.5 * std::log(c2);
    if (!(gap2 > 0.0)) return std::numeric_limits<double>::infinity();
    return std::pow(c2, -0.5 * p) * hyp.eval(b * b / c2, gap2 / c2);
  }
};

// d = 2. With z = e_1 and w = (lambda, mu), mu >= 0, the sigma-pushforward of
// x = zeta_1 is area measure / pi and the phase of zeta_2 averages out:
//   G = (1/pi) int_disk |1-x|^{-p} F(|1 - x conj(lambda)|, sqrt(1-|x|^2) mu) dA.
// The two point singularities (x = 1, x = lambda) are split with a smooth
// partition of unity and each piece is integrated in polar coordinates
// centred on its singular point.
double iterated_ball2(double s, cplx lambda, int order) {
  const bool log_kernel = (s == 2.0);
  const double p = 2.0 - s;
  const CircleMean mean(p, log_kernel);
  double mod = std::abs(lambda);
  bool lambda_on_circle = false;
  if (1.0 - mod < 1e-12) {
    lambda /= mod;
    mod = 1.0;
    lambda_on_circle = true;
  }
  const double mu = lambda_on_circle ? 0.0 : std::sqrt(std::max(0.0, 1.0 - mod * mod));
  const double sep = std::abs(1.0 - lambda);
  const double inner = std::min(1e-3, 0.05 * sep / 2.0);

  // d1 = |x - 1|^2, d2 = |x - lambda|^2 and m = 1 - |x|^2 are supplied by the
  // callers from polar offsets, which keeps them accurate near the singular
  // points. Uses |1 - x conj(lambda)|^2 - (1 - |x|^2)(1 - |lambda|^2) = d2.
  auto h = [&](double d1, double d2, double m) {
    const double b = std::sqrt(std::max(0.0, m)) * mu;
    return riesz_from_gap(2, s, std::sqrt(d1)) * mean(b, d2);
  };
  // weight of the piece attached to x = 1; vanishes to order 8 at lambda
  auto chi_one = [&](double d1, double d2) {
    const double q1 = (d1 * d1) * (d1 * d1);
    const double q2 = (d2 * d2) * (d2 * d2);
    return q2 / (q1 + q2);
  };

  numerics::CompensatedSum total;

  // angular integral over sorted breakpoints, graded toward every breakpoint
  // (disk-boundary tangency, the direction of the other singular point)
  auto angular = [&](auto&& f, std::vector<double> breaks) {
    std::sort(breaks.begin(), breaks.end());
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      const double lo = breaks[i];
      const double hi = breaks[i + 1];
      const double half = 0.5 * (hi - lo);
      if (!(half > 0.0)) continue;
      total.add(numerics::integrate_singular_offset([&](double u) { return f(lo + u); }, half,
                                                    order, 1e-3, 0.25, 4.0));
      total.add(numerics::integrate_singular_offset([&](double u) { return f(hi - u); }, half,
                                                    order, 1e-3, 0.25, 4.0));
    }
  };

  // polar integral around a boundary point P: x = P (1 - rho e^{i theta}),
  // so |x - P| = rho and 1 - |x|^2 = rho (2 cos theta - rho)
  auto around_boundary = [&](cplx P, bool attached_to_one) {
    const cplx other = attached_to_one ? lambda : cplx(1.0, 0.0);
    auto ftheta = [&](double theta) {
      const cplx dir = std::polar(1.0, theta);
      const double rho_max = 2.0 * std::cos(theta);
      if (rho_max <= 0.0) return 0.0;
      auto frho = [&](double rho) {
        const cplx x = P * (1.0 - rho * dir);
        const double near = rho * rho;
        const double far = std::norm(x - other);
        const double d1 = attached_to_one ? near : far;
        const double d2 = attached_to_one ? far : near;
        const double chi = chi_one(d1, d2);
        const double w = attached_to_one ? chi : 1.0 - chi;
        if (w == 0.0) return 0.0;
        return h(d1, d2, rho * (rho_max - rho)) * w * rho;
      };
      return numerics::integrate_singular_offset(frho, rho_max, order, inner, 0.25, 4.0);
    };
    const double toward = std::arg(1.0 - other / P);
    angular(ftheta, {-0.5 * kPi, toward, 0.5 * kPi});
  };

  around_boundary(1.0, true);
  if (lambda_on_circle) {
    around_boundary(lambda, false);
  } else {
    // interior point: full circle of directions, clipped at the unit circle;
    // 1 - |x|^2 = (rho_max - rho)(rho_max + rho + 2 proj)
    const double local_floor = std::max(1e-12, 0.05 * (1.0 - mod));
    auto ftheta = [&](double theta) {
      const cplx dir = std::polar(1.0, theta);
      const double proj = (std::conj(lambda) * dir).real();
      const double rho_max = -proj + std::sqrt(proj * proj + 1.0 - mod * mod);
      auto frho = [&](double rho) {
        const cplx x = lambda + rho * dir;
        const double d1 = std::norm(x - 1.0);
        const double d2 = rho * rho;
        const double w = 1.0 - chi_one(d1, d2);
        if (w == 0.0) return 0.0;
        return h(d1, d2, (rho_max - rho) * (rho_max + rho + 2.0 * proj)) * w * rho;
      };
      const double local_inner = std::min(inner, local_floor / rho_max);
      return numerics::integrate_singular_offset(frho, rho_max, order, local_inner, 0.25, 4.0);
    };
    const double outward = std::arg(lambda);
    double toward_one = std::arg(1.0 - lambda);
    while (toward_one < outward) toward_one += 2.0 * kPi;
    // rho_max changes on the scale sqrt(1 - |lambda|^2) around the tangents
    angular(ftheta, {outward, outward + 0.5 * kPi, toward_one, outward + 1.5 * kPi,
                     outward + 2.0 * kPi});
  }
  return total.value() / kPi;
}

}  // namespace

double iterated_kernel_of_inner(int d, double s, cplx t, int order) {
  if (!(s > 0.0 && s <= d)) throw DomainError("iterated kernel needs 0 < s <= d");
  if (std::abs(1.0 - t) < 1e-15) throw DomainError("iterated kernel is singular on the diagonal");
  switch (d) {
    case 1: {
      const double alpha = std::abs(std::arg(t));
      if (alpha == 0.0) throw DomainError("iterated kernel is singular on the diagonal");
      return iterated_circle(s, alpha, order);
    }
    case 2:
      // G(t) = G(conj t); canonicalize so that G(z,w) = G(w,z) bitwise
      return iterated_ball2(s, cplx(t.real(), std::abs(t.imag())), order);
    default:
      throw UnsupportedDimension(d);
  }
}

int iterated_kernel_order(const QuadratureRule& rule) {
  const double per_dim = std::pow(static_cast<double>(rule.size()), 1.0 / (2 * rule.d - 1));
  const double raw = rule.d == 1 ? per_dim / 64.0 : per_dim / 2.0;
  return std::clamp(static_cast<int>(std::lround(raw)), 8, 64);
}

double iterated_kernel(const KernelSpec& spec, const BoundaryPoint& z, const BoundaryPoint& w,
                       const QuadratureRule& rule) {
  if (z.dim() != spec.d || w.dim() != spec.d || rule.d != spec.d) {
    throw DomainError("dimension mismatch in iterated kernel");
  }
  return iterated_kernel_of_inner(spec.d, spec.s, hermitian_inner(z, w),
                                  iterated_kernel_order(rule));
}

}  // namespace capball
