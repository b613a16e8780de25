#include "capball/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "capball/errors.hpp"
#include "capball/numerics.hpp"

namespace capball {

using numerics::kPi;

void AtomicMeasure::validate() const {
  if (atoms.empty()) return;
  const int d = atoms.front().point.dim();
  for (const auto& at : atoms) {
    if (!(at.weight >= 0.0) || !std::isfinite(at.weight)) {
      throw ConstructionError("atom weights must be finite and nonnegative");
    }
    if (at.point.dim() != d) throw ConstructionError("atoms of mixed dimension");
  }
  std::vector<std::vector<double>> keys;
  keys.reserve(atoms.size());
  for (const auto& at : atoms) keys.push_back(at.point.to_real());
  std::sort(keys.begin(), keys.end());
  if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) {
    throw ConstructionError("atoms must be pairwise distinct");
  }
  if (support && support->dimension() != d) {
    throw ConstructionError("support set dimension does not match the atoms");
  }
}

double AtomicMeasure::total_mass() const {
  numerics::CompensatedSum s;
  for (const auto& at : atoms) s.add(at.weight);
  return s.value();
}

int AtomicMeasure::dimension() const { return atoms.empty() ? 0 : atoms.front().point.dim(); }

AtomicMeasure AtomicMeasure::point_mass(const BoundaryPoint& w, double weight) {
  AtomicMeasure mu;
  mu.atoms.push_back({w, weight});
  mu.validate();
  return mu;
}

AtomicMeasure AtomicMeasure::uniform_circle(int n, double mass) {
  if (n < 1) throw ConstructionError("uniform circle measure needs at least one atom");
  AtomicMeasure mu;
  mu.atoms.reserve(n);
  for (int k = 0; k < n; ++k) {
    mu.atoms.push_back({BoundaryPoint::on_circle(2.0 * kPi * k / n), mass / n});
  }
  mu.validate();
  return mu;
}

AtomicMeasure AtomicMeasure::from_cells(const CellComplex& cx, std::span<const double> weights) {
  if (weights.size() != cx.cells.size()) {
    throw ConstructionError("one weight per cell required");
  }
  AtomicMeasure mu;
  mu.atoms.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) mu.atoms.push_back({cx.cells[i].center, weights[i]});
  mu.validate();
  return mu;
}

AtomicMeasure operator+(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  AtomicMeasure out = mu;
  out.support.reset();
  for (const auto& at : nu.atoms) {
    auto it = std::find_if(out.atoms.begin(), out.atoms.end(),
                           [&](const Atom& x) { return x.point == at.point; });
    if (it != out.atoms.end()) {
      it->weight += at.weight;
    } else {
      out.atoms.push_back(at);
    }
  }
  out.validate();
  return out;
}

AtomicMeasure operator*(double c, const AtomicMeasure& mu) {
  if (!(c >= 0.0)) throw ConstructionError("measures scale by nonnegative factors only");
  AtomicMeasure out = mu;
  for (auto& at : out.atoms) at.weight *= c;
  return out;
}

nlohmann::json to_json(const AtomicMeasure& mu) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& at : mu.atoms) atoms.push_back({{"point", at.point.to_real()}, {"weight", at.weight}});
  nlohmann::json j{{"atoms", atoms}};
  if (mu.support) j["support"] = to_json(*mu.support);
  return j;
}

AtomicMeasure measure_from_json(const nlohmann::json& j) {
  AtomicMeasure mu;
  try {
    for (const auto& a : j.at("atoms")) {
      mu.atoms.push_back({BoundaryPoint::from_real(a.at("point").get<std::vector<double>>()),
                          a.at("weight").get<double>()});
    }
    if (j.contains("support")) mu.support = set_from_json(j.at("support"));
  } catch (const nlohmann::json::exception& e) {
    throw ConstructionError(std::string("malformed measure JSON: ") + e.what());
  }
  mu.validate();
  return mu;
}

namespace {

void require_dimension(const AtomicMeasure& mu, int d) {
  if (!mu.atoms.empty() && mu.dimension() != d) {
    throw DomainError("measure dimension does not match the evaluation point");
  }
}

template <class K>
double positive_potential(const AtomicMeasure& mu, const BoundaryPoint& z, K&& kernel) {
  require_dimension(mu, z.dim());
  numerics::CompensatedSum s;
  for (const auto& at : mu.atoms) {
    if (at.weight == 0.0) continue;
    const double k = kernel(z, at.point);
    if (std::isinf(k)) return std::numeric_limits<double>::infinity();
    s.add(at.weight * k);
  }
  return s.value();
}

std::vector<cplx> scaled(std::span<const cplx> z, double r) {
  std::vector<cplx> out(z.begin(), z.end());
  for (auto& c : out) c *= r;
  return out;
}

double norm2(std::span<const cplx> z) {
  double s = 0.0;
  for (const auto& c : z) s += std::norm(c);
  return s;
}

void require_interior(std::span<const cplx> z) {
  if (!(norm2(z) < 1.0)) throw DomainError("point must lie in the open unit ball");
}

}  // namespace

double riesz_potential(const KernelSpec& spec, const AtomicMeasure& mu, const BoundaryPoint& z) {
  return positive_potential(mu, z, [&](const BoundaryPoint& x, const BoundaryPoint& w) {
    return riesz_kernel(spec, x, w);
  });
}

double da_potential(const KernelSpec& spec, const AtomicMeasure& mu, const BoundaryPoint& z) {
  return positive_potential(mu, z, [&](const BoundaryPoint& x, const BoundaryPoint& w) {
    return da_kernel_abs(spec, x, w);
  });
}

cplx holo_potential(const KernelSpec& spec, const AtomicMeasure& mu, std::span<const cplx> z) {
  require_interior(z);
  require_dimension(mu, static_cast<int>(z.size()));
  cplx s = 0.0;
  cplx c = 0.0;
  for (const auto& at : mu.atoms) {
    if (at.weight == 0.0) continue;
    // compensated complex sum
    const cplx term = at.weight * holo_kernel(spec, z, at.point.coords());
    const cplx t = s + term;
    c += cplx(std::abs(s.real()) >= std::abs(term.real()) ? (s.real() - t.real()) + term.real()
                                                          : (term.real() - t.real()) + s.real(),
              std::abs(s.imag()) >= std::abs(term.imag()) ? (s.imag() - t.imag()) + term.imag()
                                                          : (term.imag() - t.imag()) + s.imag());
    s = t;
  }
  return s + c;
}

Dilation::Dilation(KernelSpec spec, AtomicMeasure mu, double r)
    : spec_(spec), mu_(std::move(mu)), r_(r) {
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("dilation radius must lie in [0, 1)");
}

cplx Dilation::operator()(std::span<const cplx> z) const {
  if (norm2(z) > 1.0 + 1e-12) throw DomainError("dilated evaluation needs |z| <= 1");
  return holo_potential(spec_, mu_, scaled(z, r_));
}

Dilation dilate(const KernelSpec& spec, const AtomicMeasure& mu, double r) {
  return Dilation(spec, mu, r);
}

namespace {

void require_sarason_inputs(const KernelSpec& spec, const AtomicMeasure& mu, double r,
                            std::span<const cplx> z) {
  if (!(spec.a >= 0.0 && spec.a <= 1.0)) throw DomainError("Sarason function needs 0 <= a <= 1");
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("dilation radius must lie in [0, 1)");
  require_interior(z);
  require_dimension(mu, static_cast<int>(z.size()));
}

// sum_{n > N} (n + 1) q^n
double weighted_geometric_tail(double q, int N) {
  if (q == 0.0) return 0.0;
  const double head = std::pow(q, N + 1);
  return head * ((N + 2) / (1.0 - q) + q / ((1.0 - q) * (1.0 - q)));
}

}  // namespace

SarasonValue sarason_function_direct(const KernelSpec& spec, const AtomicMeasure& mu, double r,
                                     std::span<const cplx> z) {
  require_sarason_inputs(spec, mu, r, z);
  const std::size_t n = mu.atoms.size();
  std::vector<std::vector<cplx>> pts(n);
  for (std::size_t j = 0; j < n; ++j) pts[j] = scaled(mu.atoms[j].point.coords(), r);
  // f_r at the dilated atoms: f_r(r zeta_j) = sum_k w_k K(r zeta_j, r zeta_k)
  std::vector<cplx> f(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) f[j] += mu.atoms[k].weight * holo_kernel(spec, pts[j], pts[k]);
  }
  cplx inner = 0.0;
  double nrm = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = mu.atoms[j].weight;
    inner += w * holo_kernel(spec, z, pts[j]) * std::conj(f[j]);
    nrm += w * f[j].real();
  }
  SarasonValue v;
  v.value = 2.0 * inner - nrm;
  v.norm_squared = nrm;
  v.path = "double-sum";
  return v;
}

SarasonValue sarason_function(const KernelSpec& spec, const AtomicMeasure& mu, double r,
                              std::span<const cplx> z, int N, double tol) {
  require_sarason_inputs(spec, mu, r, z);
  if (z.size() != 1) return sarason_function_direct(spec, mu, r, z);
  if (N < 1) throw DomainError("truncation must be at least 1");
  const auto a = series_coefficients_da(spec.a, N);
  // c_n = a_n r^n mu^(n), mu^(n) = sum w conj(zeta)^n
  std::vector<cplx> c(N + 1, 0.0);
  for (const auto& at : mu.atoms) {
    const double theta = std::arg(at.point[0]);
    for (int k = 0; k <= N; ++k) c[k] += at.weight * std::polar(1.0, -k * theta);
  }
  double rn = 1.0;
  for (int k = 0; k <= N; ++k) {
    c[k] *= a[k] * rn;
    rn *= r;
  }
  // K_z f has coefficients g_n = sum_m a_m conj(z)^m c_{n-m}
  const cplx zc = std::conj(z[0]);
  std::vector<cplx> kz(N + 1);
  cplx p = 1.0;
  for (int m = 0; m <= N; ++m) {
    kz[m] = a[m] * p;
    p *= zc;
  }
  cplx inner = 0.0;
  double nrm = 0.0;
  for (int n = 0; n <= N; ++n) {
    cplx g = 0.0;
    for (int m = 0; m <= n; ++m) g += kz[m] * c[n - m];
    inner += c[n] * std::conj(g) / a[n];
    nrm += std::norm(c[n]) / a[n];
  }
  // |c_n| <= a_n r^n M and a_n <= 1, so |g_n| <= (n+1) M max(r,|z|)^n
  const double mass = mu.total_mass();
  const double rho = std::max(r, std::abs(z[0]));
  const double tail = mass * mass *
                      (2.0 * weighted_geometric_tail(r * rho, N) +
                       (r == 0.0 ? 0.0 : std::pow(r, 2 * N + 2) / (1.0 - r * r)));
  if (tail > tol) throw ToleranceNotMet("Sarason series truncated too early", tail);
  SarasonValue v;
  v.value = 2.0 * inner - nrm;
  v.norm_squared = nrm;
  v.tail = tail;
  v.truncation = N;
  v.path = "coefficients";
  return v;
}

std::vector<double> default_probe_radii(int n, double stop) {
  if (n < 2) throw ConfigError("probe grid needs at least two radii");
  if (!(stop > 0.0 && stop < 1.0)) throw ConfigError("probe stop radius must lie in (0, 1)");
  const double decades = -std::log10(1.0 - stop);
  std::vector<double> radii{0.0};
  for (int k = 1; k < n; ++k) radii.push_back(1.0 - std::pow(10.0, -decades * k / (n - 1)));
  radii.back() = stop;
  return radii;
}

std::vector<cplx> radial_probe(const KernelSpec& spec, const AtomicMeasure& mu,
                               const BoundaryPoint& zeta, std::span<const double> radii) {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] >= 0.0 && radii[i] < 1.0)) throw DomainError("probe radii must lie in [0, 1)");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw DomainError("probe radii must increase strictly");
  }
  std::vector<cplx> out;
  out.reserve(radii.size());
  for (double r : radii) out.push_back(holo_potential(spec, mu, scaled(zeta.coords(), r)));
  return out;
}

std::string probe_csv(std::span<const double> radii, std::span<const cplx> values) {
  if (radii.size() != values.size()) throw DomainError("one value per radius required");
  std::string out = "r,re,im,abs\n";
  char buf[128];
  for (std::size_t i = 0; i < radii.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", radii[i], values[i].real(),
                  values[i].imag(), std::abs(values[i]));
    out += buf;
  }
  return out;
}

}  // namespace capball
