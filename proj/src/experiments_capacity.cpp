#include <algorithm>
#include <cmath>
#include <sstream>

#include "capball/energy.hpp"
#include "capball/errors.hpp"
#include "capball/experiments.hpp"
#include "capball/parallel.hpp"
#include "experiment_util.hpp"

namespace capball {

using numerics::kPi;

namespace {

struct Solved {
  EquilibriumResult result;
  std::size_t cells = 0;
};

Solved solve(const SetSpec& set, const KernelSpec& spec, EnergyFlavor flavor, int mesh, double tol) {
  const auto cx = discretize(set, spec, mesh);
  const auto m = build_energy_matrix(cx, spec, flavor);
  std::vector<double> start;
  for (const auto& cell : cx.cells) start.push_back(cell.mass);
  const double total = cx.total_mass();
  for (auto& w : start) w /= total;
  Solved s{equilibrium(m, tol, kDefaultMaxIter, start), cx.size()};
  s.result.mesh = mesh;
  return s;
}

// each cell center of the smaller set must lie in the larger one
bool nested(const SetSpec& inner, const SetSpec& outer, const KernelSpec& spec) {
  const auto cx = discretize(inner, spec, 512);
  for (const auto& cell : cx.cells) {
    if (!set_contains(outer, cell.center)) return false;
  }
  return true;
}

nlohmann::json row_json(const std::string& family, const nlohmann::json& key, const EquilibriumResult& r) {
  auto j = to_json(r);
  j["family"] = family;
  j["key"] = key;
  return j;
}

void csv_row(std::ostringstream& csv, const std::string& family, const std::string& key,
             const EquilibriumResult& r) {
  csv << family << ',' << key << ',' << r.mesh << ',' << fmt17(r.capacity()) << ','
      << fmt17(r.capacity_lower) << ',' << fmt17(r.capacity_upper) << ',' << (r.certified ? 1 : 0) << '\n';
}

}  // namespace

Report run_capacity_battery(const ExperimentConfig& c) {
  if (c.d != 1) throw UnsupportedDimension(c.d);
  const auto spec = KernelSpec::from_s(1, c.s);
  spec.require_capacity_range();
  const auto spec2 = KernelSpec::from_a(2, spec.a);
  const auto flavor = parse_flavor(c.flavor);
  if (c.meshes.size() < 4) throw ConfigError("refinement needs at least four meshes");
  for (const auto& set : c.battery) set.validate();
  auto rep = detail::start_report(c, "capacity-battery");
  std::ostringstream csv;
  csv << "family,key,mesh,capacity,capacity_lower,capacity_upper,certified\n";
  nlohmann::json rows = nlohmann::json::array();
  bool certified = true;

  // Jobs: chain, arc sweep, Cantor depth and ratio sweeps, cap sweep, refinement stacks.
  struct Job {
    std::string family, key;
    SetSpec set;
    KernelSpec spec;
    int mesh;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < c.battery.size(); ++i) {
    jobs.push_back({"chain", std::to_string(i), c.battery[i], spec, c.mesh});
  }
  const std::vector<double> lengths{kPi / 16, kPi / 8, kPi / 4, kPi / 2, kPi, 2 * kPi};
  for (double len : lengths) jobs.push_back({"arc", fmt17(len), SetSpec::arc(0.0, len), spec, c.mesh});
  for (int k = 0; k <= 6; ++k) {
    jobs.push_back({"cantor-depth", std::to_string(k), SetSpec::cantor(0.0, kPi / 2, {1.0 / 3.0}, k), spec, c.mesh});
  }
  const std::vector<double> ratios{0.4, 1.0 / 3.0, 0.25, 1.0 / 6.0, 0.1};
  for (double r : ratios) {
    jobs.push_back({"cantor-ratio", fmt17(r), SetSpec::cantor(0.0, kPi / 2, {r}, 5), spec, c.mesh});
  }
  const std::vector<double> deltas{0.25, 0.5, 0.75, 1.0, 1.25};
  const auto pole = BoundaryPoint::basis(2, 0);
  for (double dl : deltas) jobs.push_back({"cap", fmt17(dl), SetSpec::cap(pole, dl), spec2, 64});
  for (int m : c.meshes) jobs.push_back({"refine-arc", std::to_string(m), SetSpec::arc(0.0, kPi / 2), spec, m});
  for (int m : c.meshes) jobs.push_back({"refine-cap", std::to_string(m), SetSpec::cap(pole, 1.0), spec2, m});

  std::vector<EquilibriumResult> results(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto& j = jobs[i];
    // Bessel is built for arcs and rings only; caps use the same flavor
    results[i] = solve(j.set, j.spec, flavor, j.mesh, c.tol).result;
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    certified = certified && results[i].certified;
    rows.push_back(row_json(jobs[i].family, jobs[i].key, results[i]));
    csv_row(csv, jobs[i].family, jobs[i].key, results[i]);
  }
  rep.csv = csv.str();
  rep.json["rows"] = rows;

  auto family = [&](const std::string& name) {
    std::vector<double> v;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (jobs[i].family == name) v.push_back(results[i].capacity());
    }
    return v;
  };
  // monotone within the certified bracket
  const double slack = 1.0 + 10.0 * c.tol;
  auto nondecreasing = [&](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i] * slack < v[i - 1]) return false;
    }
    return true;
  };
  auto nonincreasing = [&](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i] > v[i - 1] * slack) return false;
    }
    return true;
  };
  auto increments_shrink = [](const std::vector<double>& v) {
    for (std::size_t i = 2; i < v.size(); ++i) {
      if (std::abs(v[i] - v[i - 1]) >= std::abs(v[i - 1] - v[i - 2])) return false;
    }
    return true;
  };

  bool chain_nested = true;
  for (std::size_t i = 1; i < c.battery.size(); ++i) {
    chain_nested = chain_nested && nested(c.battery[i - 1], c.battery[i], spec);
  }
  const auto refine_arc = family("refine-arc");
  const auto refine_cap = family("refine-cap");
  nlohmann::json increments = {{"arc", nlohmann::json::array()}, {"cap", nlohmann::json::array()}};
  for (std::size_t i = 1; i < refine_arc.size(); ++i) {
    increments["arc"].push_back(std::abs(refine_arc[i] - refine_arc[i - 1]));
    increments["cap"].push_back(std::abs(refine_cap[i] - refine_cap[i - 1]));
  }
  rep.json["refinementIncrements"] = increments;
  const auto arcs = family("arc");
  rep.json["fullCircleCapacity"] = arcs.back();

  detail::finish_report(rep, {{"certified", certified},
                              {"chainNested", chain_nested},
                              {"chainMonotone", nondecreasing(family("chain"))},
                              {"arcSweepIncreasing", nondecreasing(arcs)},
                              {"capSweepIncreasing", nondecreasing(family("cap"))},
                              {"cantorDepthDecreasing", nonincreasing(family("cantor-depth"))},
                              {"cantorRatioDecreasing", nonincreasing(family("cantor-ratio"))},
                              {"refinementArc", increments_shrink(refine_arc)},
                              {"refinementCap", increments_shrink(refine_cap)}});
  return rep;
}

// ---------------------------------------------------------------------------

Report run_circle_anchor(const ExperimentConfig& c) {
  const auto spec = KernelSpec::from_s(c.d, c.s);
  if (c.battery.empty()) throw ConfigError("anchor needs a set");
  auto rep = detail::start_report(c, "anchor");
  const auto cx = discretize(c.battery.front(), spec, c.mesh);
  const auto m = build_energy_matrix(cx, spec, parse_flavor(c.flavor));
  std::vector<double> start(cx.size(), 1.0 / cx.size());
  const auto r = equilibrium(m, c.tol, kDefaultMaxIter, start);
  double dev = 0.0;
  for (double w : r.weights) dev = std::max(dev, std::abs(w * cx.size() - 1.0));
  const double bracket = r.capacity_upper - r.capacity_lower;
  constexpr double kCapacityTol = 1e-3;
  constexpr double kBracketTol = 2e-3;
  constexpr double kUniformTol = 1e-3;
  rep.json["result"] = to_json(r);
  rep.json["bracket"] = bracket;
  rep.json["uniformDeviation"] = dev;
  rep.json["tolerances"] = {{"capacity", kCapacityTol}, {"bracket", kBracketTol}, {"uniform", kUniformTol}};
  std::ostringstream csv;
  csv << "cell,weight\n";
  for (std::size_t i = 0; i < r.weights.size(); ++i) csv << i << ',' << fmt17(r.weights[i]) << '\n';
  rep.csv = csv.str();
  detail::finish_report(rep, {{"certified", r.certified},
                              {"capacityNearOne", std::abs(r.capacity() - 1.0) <= kCapacityTol},
                              {"bracket", bracket < kBracketTol},
                              {"uniformWeights", dev <= kUniformTol}});
  return rep;
}

// ---------------------------------------------------------------------------

Report run_oracle_equivalence(const ExperimentConfig& c) {
  const auto spec = KernelSpec::from_s(c.d, c.s);
  auto rep = detail::start_report(c, "oracle");
  constexpr double kAgreement = 1e-9;
  constexpr int kPgIterations = 50000;
  struct Job {
    std::size_t set;
    int mesh;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < c.battery.size(); ++i) {
    for (int m : c.meshes) {
      if (m > 64) throw ConfigError("oracle comparison is limited to meshes <= 64");
      jobs.push_back({i, m});
    }
  }
  struct Out {
    double fw = 0.0, pg = 0.0, worst = 0.0;
    bool certified = false;
  };
  std::vector<Out> outs(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t k) {
    const auto cx = discretize(c.battery[jobs[k].set], spec, jobs[k].mesh);
    const auto m = build_energy_matrix(cx, spec, parse_flavor(c.flavor));
    numerics::CounterRng rng(c.seed + 1000 * k);
    Out o;
    o.fw = 1e300;
    o.pg = 1e300;
    o.certified = true;
    for (int t = 0; t < c.samples; ++t) {
      std::vector<double> start = t == 0 ? std::vector<double>(cx.size(), 1.0 / cx.size())
                                         : detail::dirichlet_weights(rng, cx.size(), t % 2 == 0);
      const auto r = equilibrium(m, c.tol, kDefaultMaxIter, start);
      o.certified = o.certified && r.certified;
      double v = 0.0;
      projected_gradient_minimum(m, start, kPgIterations, &v);
      o.worst = std::max(o.worst, std::abs(r.energy_min - v) / r.energy_min);
      o.fw = std::min(o.fw, r.energy_min);
      o.pg = std::min(o.pg, v);
    }
    outs[k] = o;
  });
  std::ostringstream csv;
  csv << "set,mesh,fw_energy,pg_energy,worst_relative\n";
  nlohmann::json rows = nlohmann::json::array();
  bool agree = true, certified = true;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const auto& o = outs[k];
    agree = agree && o.worst <= kAgreement;
    certified = certified && o.certified;
    rows.push_back({{"set", jobs[k].set}, {"mesh", jobs[k].mesh}, {"fw", o.fw}, {"pg", o.pg}, {"worst", o.worst}});
    csv << jobs[k].set << ',' << jobs[k].mesh << ',' << fmt17(o.fw) << ',' << fmt17(o.pg) << ','
        << fmt17(o.worst) << '\n';
  }
  rep.csv = csv.str();
  rep.json["rows"] = rows;
  rep.json["agreement"] = kAgreement;
  detail::finish_report(rep, {{"agree", agree}, {"certified", certified}});
  return rep;
}

}  // namespace capball
