#include "capball/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "capball/energy.hpp"
#include "capball/errors.hpp"
#include "capball/kernels.hpp"
#include "capball/numerics.hpp"
#include "capball/parallel.hpp"
#include "experiment_util.hpp"

namespace capball {

using numerics::kPi;

namespace {

int g_threads = 0;  // 0: not set, read CAPBALL_THREADS once

}  // namespace

void set_thread_count(int n) { g_threads = std::max(1, n); }

int thread_count() {
  if (g_threads == 0) {
    const char* env = std::getenv("CAPBALL_THREADS");
    const int v = env ? std::atoi(env) : 1;
    g_threads = std::max(1, v);
  }
  return g_threads;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
  return buf;
}

std::vector<std::string> experiment_ids() {
  return {"comparability", "capacity-battery", "extremal-audit", "pick-regularity",
          "multiplier",    "identities",       "anchor",         "oracle"};
}

ExperimentConfig default_config(const std::string& id, int d, double s) {
  ExperimentConfig c;
  c.id = id;
  c.d = d;
  c.s = s;
  if (id == "comparability") {
    c.mesh = 64;
    c.samples = 50;
    c.seed = 7;
  } else if (id == "capacity-battery") {
    c.d = 1;
    c.mesh = 256;
    c.meshes = {64, 128, 256, 512};
    c.tol = 1e-8;
    c.battery = {
        SetSpec::cantor(0.0, kPi / 2, {1.0 / 3.0}, 4),
        SetSpec::cantor(0.0, kPi / 2, {1.0 / 3.0}, 3),
        SetSpec::cantor(0.0, kPi / 2, {1.0 / 3.0}, 2),
        SetSpec::cantor(0.0, kPi / 2, {1.0 / 3.0}, 1),
        SetSpec::arc(0.0, kPi / 2),
        SetSpec::union_of({SetSpec::arc(0.0, kPi / 2), SetSpec::arc(kPi, 5 * kPi / 4)}),
        SetSpec::union_of({SetSpec::arc(0.0, kPi / 2), SetSpec::arc(kPi, 3 * kPi / 2)}),
        SetSpec::arc(0.0, 3 * kPi / 2),
        SetSpec::arc(-kPi / 4, 3 * kPi / 2),
        SetSpec::full_circle(),
    };
  } else if (id == "extremal-audit") {
    c.d = 1;
    c.a_values = {0.0, 0.5};
    c.battery = {SetSpec::arc(0.0, kPi / 8), SetSpec::arc(0.0, kPi / 4), SetSpec::arc(0.0, kPi / 2)};
    c.mesh = 128;
    c.tol = 1e-9;
    c.truncation = 1 << 18;
  } else if (id == "pick-regularity") {
    c.a_values = {0.25, 0.5, 1.0, 2.0};
    c.truncation = 200;
  } else if (id == "multiplier") {
    c.d = 1;
    c.a_values = {0.0, 0.5};
    c.battery = {SetSpec::arc(0.0, kPi / 8), SetSpec::arc(0.0, kPi / 4), SetSpec::arc(0.0, kPi / 2)};
    c.meshes = {64, 128, 256, 512};
    c.mesh = 128;
    c.truncation = 512;
    c.window = 50.0;
  } else if (id == "identities") {
    c.d = 1;
    c.samples = 100;
    c.truncation = kDefaultTruncation;
    c.tol = 1e-10;
    c.seed = 11;
  } else if (id == "anchor") {
    c.d = 1;
    c.s = 0.5;
    c.mesh = 2048;
    c.tol = 1e-6;
    c.battery = {SetSpec::full_circle()};
  } else if (id == "oracle") {
    c.d = 1;
    c.meshes = {8, 16, 32, 64};
    c.tol = 1e-12;
    c.samples = 5;
    c.seed = 3;
    c.battery = {SetSpec::arc(0.0, kPi / 3),
                 SetSpec::union_of({SetSpec::arc(0.0, 0.5), SetSpec::arc(2.0, 3.5)}),
                 SetSpec::cantor(0.0, kPi, {1.0 / 3.0}, 2)};
  } else {
    throw ConfigError("unknown experiment '" + id + "'");
  }
  return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json battery = nlohmann::json::array();
  for (const auto& set : c.battery) battery.push_back(to_json(set));
  return {{"id", c.id},
          {"d", c.d},
          {"s", c.s},
          {"aValues", c.a_values},
          {"battery", battery},
          {"meshes", c.meshes},
          {"flavor", c.flavor},
          {"mesh", c.mesh},
          {"tol", c.tol},
          {"seed", c.seed},
          {"samples", c.samples},
          {"window", c.window},
          {"truncation", c.truncation}};
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object() || !j.contains("id")) throw ConfigError("experiment config needs an id");
    auto c = default_config(j.at("id").get<std::string>(), j.value("d", 1), j.value("s", 0.5));
    if (j.contains("aValues")) c.a_values = j.at("aValues").get<std::vector<double>>();
    if (j.contains("battery")) {
      c.battery.clear();
      for (const auto& s : j.at("battery")) c.battery.push_back(set_from_json(s));
    }
    if (j.contains("meshes")) c.meshes = j.at("meshes").get<std::vector<int>>();
    c.flavor = j.value("flavor", c.flavor);
    c.mesh = j.value("mesh", c.mesh);
    c.tol = j.value("tol", c.tol);
    c.seed = j.value("seed", c.seed);
    c.samples = j.value("samples", c.samples);
    c.window = j.value("window", c.window);
    c.truncation = j.value("truncation", c.truncation);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
}

std::string config_digest(const ExperimentConfig& c) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : to_json(c).dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

Report start_report(const ExperimentConfig& c, const char* name) {
  Report r;
  r.json["experiment"] = name;
  r.json["version"] = kVersion;
  r.json["configDigest"] = config_digest(c);
  r.json["config"] = to_json(c);
  return r;
}

void finish_report(Report& r, const nlohmann::json& checks) {
  bool ok = true;
  for (const auto& [k, v] : checks.items()) ok = ok && v.get<bool>();
  r.json["checks"] = checks;
  r.json["passed"] = ok;
  r.passed = ok;
}

std::vector<double> dirichlet_weights(numerics::CounterRng& rng, std::size_t n, bool sparse) {
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) {
    x = -std::log(1.0 - rng.next_uniform());
    if (sparse && rng.next_uniform() < 0.7) x = 0.0;
    total += x;
  }
  if (total == 0.0) {
    w[0] = 1.0;
    total = 1.0;
  }
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace detail

// ---------------------------------------------------------------------------

namespace {

constexpr int kDistances = 25;
constexpr int kPhases = 5;
constexpr double kMinDistance = 1e-3;

}  // namespace

Report run_comparability(const ExperimentConfig& c) {
  const auto spec = KernelSpec::from_s(c.d, c.s);
  spec.require_capacity_range();
  if (c.d != 1 && c.d != 2) throw UnsupportedDimension(c.d);
  auto rep = detail::start_report(c, "comparability");
  const int order = c.d == 1 ? 16 : 12;

  struct Row {
    double distance, psi, iterated, direct, ratio, swapped;
  };
  std::vector<Row> rows(kDistances * kPhases);
  const double top = std::sqrt(2.0);
  parallel_for(rows.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx) / kPhases;
    const int j = static_cast<int>(idx) % kPhases;
    const double delta = kMinDistance * std::pow(top / kMinDistance, i / double(kDistances - 1));
    const double g = delta * delta;
    // 1 - t = g e^{i psi}; |t| <= 1 needs cos psi >= g / 2, equality on the sphere
    const double edge = std::acos(std::min(1.0, g / 2.0));
    const double psi = c.d == 1 ? edge : edge * (2.0 * j / (kPhases - 1) - 1.0);
    const cplx t = 1.0 - std::polar(g, psi);
    Row r{};
    r.distance = delta;
    r.psi = psi;
    r.iterated = iterated_kernel_of_inner(c.d, c.s, t, order);
    r.direct = da_kernel_abs_from_gap(spec, g);
    r.ratio = r.iterated / r.direct;
    r.swapped = iterated_kernel_of_inner(c.d, c.s, std::conj(t), order) / r.direct;
    rows[idx] = r;
  });

  double c1 = 1e300, c2 = 0.0;
  bool swap_ok = true;
  for (const auto& r : rows) {
    c1 = std::min(c1, r.ratio);
    c2 = std::max(c2, r.ratio);
    swap_ok = swap_ok && r.swapped == r.ratio;
  }

  // Energy ratios on one complex. Random probability weights, half of them sparse.
  const SetSpec set = c.d == 1 ? SetSpec::arc(0.0, kPi) : SetSpec::cap(BoundaryPoint::basis(2, 0), 1.0);
  const auto cx = discretize(set, spec, c.mesh);
  const auto da = build_energy_matrix(cx, spec, EnergyFlavor::Da);
  const auto bessel = build_energy_matrix(cx, spec, EnergyFlavor::Bessel);
  numerics::CounterRng rng(c.seed);
  std::vector<double> eratios;
  for (int k = 0; k < c.samples; ++k) {
    const auto w = detail::dirichlet_weights(rng, cx.size(), k % 2 == 1);
    eratios.push_back(energy(bessel, w) / energy(da, w));
  }
  const double e1 = *std::min_element(eratios.begin(), eratios.end());
  const double e2 = *std::max_element(eratios.begin(), eratios.end());

  std::ostringstream csv;
  csv << "family,index,distance,psi,iterated,direct,ratio\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    csv << "kernel," << i << ',' << fmt17(r.distance) << ',' << fmt17(r.psi) << ',' << fmt17(r.iterated)
        << ',' << fmt17(r.direct) << ',' << fmt17(r.ratio) << '\n';
  }
  for (std::size_t i = 0; i < eratios.size(); ++i) {
    csv << "energy," << i << ",,,,," << fmt17(eratios[i]) << '\n';
  }
  rep.csv = csv.str();

  rep.json["spec"] = {{"d", spec.d}, {"s", spec.s}, {"a", spec.a}};
  rep.json["kernelWindow"] = {{"c1", c1}, {"c2", c2}, {"ratio", c2 / c1},
                              {"minDistance", kMinDistance}, {"maxDistance", top},
                              {"ratioAtMinDistance", rows.front().ratio}};
  rep.json["energyRatios"] = {{"min", e1}, {"max", e2}, {"count", eratios.size()}, {"mesh", c.mesh},
                              {"set", to_json(set)}};
  detail::finish_report(rep, {{"windowBound", c2 / c1 <= c.window},
                              {"energyInWindow", e1 >= c1 && e2 <= c2},
                              {"swapSymmetric", swap_ok}});
  return rep;
}

// ---------------------------------------------------------------------------

Report run_pick_and_regularity(const ExperimentConfig& c) {
  auto rep = detail::start_report(c, "pick-regularity");
  const int N = c.truncation;
  struct Space {
    SeriesCoefficients coeffs;
    bool expect_pick;      // b_n >= 0 up to N
    int expect_negative;   // first negative index, 0 when not pinned
  };
  std::vector<Space> spaces;
  spaces.push_back({series_coefficients_modified_log(N + 1), true, 0});
  spaces.push_back({series_coefficients_da(0.0, N + 1), false, 0});
  for (double a : c.a_values) {
    spaces.push_back({series_coefficients_da(a, N + 1), a <= 1.0, a == 2.0 ? 2 : 0});
  }
  spaces.push_back({series_coefficients_hs(2, 0.75, N + 1), false, 0});
  spaces.push_back({series_coefficients_hs(2, 1.0, N + 1), false, 0});

  // pick coefficients come from a recursion; exact zeros can round to -1e-17
  constexpr double kPickFloor = -1e-13;
  std::ostringstream csv;
  csv << "space,parameter,n,a_n,b_n,ratio\n";
  nlohmann::json out = nlohmann::json::array();
  bool pick_ok = true, negative_ok = true, regular_ok = true;
  for (const auto& sp : spaces) {
    const auto b = pick_coefficients(sp.coeffs, N);
    const auto reg = regularity(sp.coeffs);
    int first_negative = 0;
    double min_b = 1e300;
    for (int n = 1; n <= N; ++n) {
      min_b = std::min(min_b, b[n - 1]);
      if (first_negative == 0 && b[n - 1] < kPickFloor) first_negative = n;
    }
    const bool regular = reg.first_within_1e2 >= 0 && reg.first_within_1e2 <= 100;
    if (sp.expect_pick) pick_ok = pick_ok && first_negative == 0;
    if (sp.expect_negative) negative_ok = negative_ok && first_negative == sp.expect_negative;
    regular_ok = regular_ok && regular;
    out.push_back({{"space", sp.coeffs.space},
                   {"parameter", sp.coeffs.parameter},
                   {"firstNegative", first_negative},
                   {"minB", min_b},
                   {"pick", first_negative == 0},
                   {"ratioSettledAt", reg.first_within_1e2},
                   {"ratioWindowOk", reg.ratio_window_ok}});
    for (int n = 1; n <= N; ++n) {
      csv << sp.coeffs.space << ',' << fmt17(sp.coeffs.parameter) << ',' << n << ',' << fmt17(sp.coeffs[n])
          << ',' << fmt17(b[n - 1]) << ',' << fmt17(reg.ratios[n]) << '\n';
    }
  }
  rep.csv = csv.str();
  rep.json["spaces"] = out;
  rep.json["pickFloor"] = kPickFloor;
  detail::finish_report(rep, {{"pickNonnegative", pick_ok},
                              {"firstNegativePinned", negative_ok},
                              {"regularBy100", regular_ok}});
  return rep;
}

Report run_experiment(const ExperimentConfig& c) {
  if (c.id == "comparability") return run_comparability(c);
  if (c.id == "capacity-battery") return run_capacity_battery(c);
  if (c.id == "extremal-audit") return run_extremal_audit(c);
  if (c.id == "pick-regularity") return run_pick_and_regularity(c);
  if (c.id == "multiplier") return run_multiplier_suite(c);
  if (c.id == "identities") return run_identity_suite(c);
  if (c.id == "anchor") return run_circle_anchor(c);
  if (c.id == "oracle") return run_oracle_equivalence(c);
  throw ConfigError("unknown experiment '" + c.id + "'");
}

}  // namespace capball
