// capball command-line front end.
//
// Exit codes: 0 success or certified, 2 uncertified result or failed
// verification, 64 usage error, 1 runtime failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "capball/energy.hpp"
#include "capball/errors.hpp"
#include "capball/experiments.hpp"
#include "capball/kernels.hpp"
#include "capball/measures.hpp"
#include "capball/parallel.hpp"
#include "capball/sets.hpp"

using namespace capball;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUncertified = 2;
constexpr int kExitUsage = 64;

struct SpecFlags {
  std::optional<double> a;
  std::optional<double> s;
  int d = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--a", a, "kernel exponent a = d - 2s");
    cmd->add_option("--s", s, "smoothness s");
    cmd->add_option("--d", d, "dimension")->check(CLI::PositiveNumber);
  }

  KernelSpec resolve(int set_dim = 0) const {
    if (a && s) throw ConfigError("give --a or --s, not both");
    const int dim = set_dim > 0 ? set_dim : d;
    if (set_dim > 0 && d != 1 && d != set_dim) throw ConfigError("--d disagrees with the set dimension");
    if (a) return KernelSpec::from_a(dim, *a);
    if (s) return KernelSpec::from_s(dim, *s);
    return KernelSpec::from_a(dim, 0.0);
  }
};

json spec_json(const KernelSpec& spec) { return {{"d", spec.d}, {"s", spec.s}, {"a", spec.a}}; }

// text form, inline JSON, or @path to a JSON file
SetSpec read_set(const std::string& text) {
  try {
    if (!text.empty() && text[0] == '@') {
      std::ifstream in(text.substr(1));
      if (!in) throw ConfigError("cannot read " + text.substr(1));
      return set_from_json(json::parse(in));
    }
    if (!text.empty() && text[0] == '{') return set_from_json(json::parse(text));
    return parse_set(text);
  } catch (const ConstructionError& e) {
    throw ConfigError(std::string("bad --set: ") + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad --set: ") + e.what());
  }
}

json read_json_arg(const std::string& text) {
  try {
    if (!text.empty() && text[0] == '@') {
      std::ifstream in(text.substr(1));
      if (!in) throw ConfigError("cannot read " + text.substr(1));
      return json::parse(in);
    }
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed JSON argument: ") + e.what());
  }
}

// JSON with every double printed as %.17g; layout matches json::dump(2), or
// json::dump() when indent is negative.
void write_json(std::ostringstream& os, const json& j, int indent) {
  const bool compact = indent < 0;
  const std::string pad(compact ? 0 : indent + 2, ' '), close(compact ? 0 : indent, ' ');
  const char* nl = compact ? "" : "\n";
  const char* sep = compact ? ":" : ": ";
  const int inner = compact ? -1 : indent + 2;
  if (j.is_object()) {
    if (j.empty()) {
      os << "{}";
      return;
    }
    os << "{" << nl;
    bool first = true;
    for (const auto& [k, v] : j.items()) {
      if (!first) os << "," << nl;
      first = false;
      os << pad << json(k).dump() << sep;
      write_json(os, v, inner);
    }
    os << nl << close << "}";
  } else if (j.is_array()) {
    if (j.empty()) {
      os << "[]";
      return;
    }
    os << "[" << nl;
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) os << "," << nl;
      os << pad;
      write_json(os, j[i], inner);
    }
    os << nl << close << "]";
  } else if (j.is_number_float()) {
    const double x = j.get<double>();
    os << (std::isfinite(x) ? fmt17(x) : "null");
  } else {
    os << j.dump();
  }
}

std::string dump17(const json& j) {
  std::ostringstream os;
  write_json(os, j, 0);
  os << "\n";
  return os.str();
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error("cannot write " + out);
  f << text;
}

std::string csv_with_config(const json& config, const std::string& csv) {
  std::ostringstream os;
  write_json(os, config, -1);
  return "# config " + os.str() + "\n" + csv;
}

std::vector<double> normalized_masses(const CellComplex& cx) {
  std::vector<double> w;
  for (const auto& c : cx.cells) w.push_back(c.mass / cx.total_mass());
  return w;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capacities, energies and potentials on the sphere"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker cap (also CAPBALL_THREADS)")->check(CLI::PositiveNumber);

  // capacity / energy / potential share set flags
  std::string set_text, flavor_name = "da", out_path, csv_path, weights_text, measure_text;
  int mesh = 256;
  double tol = kDefaultTol;
  long max_iter = kDefaultMaxIter;
  SpecFlags spec_flags;

  auto* capacity_cmd = app.add_subcommand("capacity", "equilibrium measure and capacity of a set");
  auto* energy_cmd = app.add_subcommand("energy", "energy of a weight vector on a discretized set");
  auto* potential_cmd = app.add_subcommand("potential", "Frostman check of the equilibrium potential");
  for (auto* cmd : {capacity_cmd, energy_cmd, potential_cmd}) {
    cmd->add_option("--set", set_text, "arc:t0:t1 | cap:... | cantor:... | JSON | @file")->required();
    spec_flags.attach(cmd);
    cmd->add_option("--flavor", flavor_name, "da | bessel");
    cmd->add_option("--mesh", mesh, "cells")->check(CLI::Range(1, kMaxMesh));
    cmd->add_option("--out", out_path, "output path (default stdout)");
  }
  for (auto* cmd : {capacity_cmd, potential_cmd}) {
    cmd->add_option("--tol", tol, "relative bracket width")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", max_iter, "iteration cap")->check(CLI::PositiveNumber);
  }
  capacity_cmd->add_option("--csv", csv_path, "write equilibrium weights as CSV");
  energy_cmd->add_option("--weights", weights_text, "JSON array or @file; default normalized cell masses");

  // kernel / pick
  int count = 10;
  std::string space = "da";
  bool as_csv = false;
  auto* kernel_cmd = app.add_subcommand("kernel", "power-series weights a_0..a_{n-1}");
  auto* pick_cmd = app.add_subcommand("pick", "reciprocal-series coefficients b_1..b_n");
  for (auto* cmd : {kernel_cmd, pick_cmd}) {
    spec_flags.attach(cmd);
    cmd->add_option("--n", count, "number of coefficients")->check(CLI::Range(1, 1 << 20));
    cmd->add_option("--space", space, "da | modified-log | hs");
    cmd->add_option("--out", out_path, "output path (default stdout)");
  }
  pick_cmd->add_flag("--csv", as_csv, "emit CSV instead of JSON");
  bool kernel_json = false;
  kernel_cmd->add_flag("--json", kernel_json, "emit JSON instead of CSV");

  // probe
  double theta = 0.0;
  int radii_count = 41;
  auto* probe_cmd = app.add_subcommand("probe", "holomorphic potential along a ray");
  probe_cmd->add_option("--measure", measure_text, "measure JSON or @file");
  probe_cmd->add_option("--set", set_text, "use the capacity-normalized equilibrium measure of a set");
  spec_flags.attach(probe_cmd);
  probe_cmd->add_option("--mesh", mesh, "cells when --set is given")->check(CLI::Range(1, kMaxMesh));
  probe_cmd->add_option("--tol", tol, "equilibrium tolerance when --set is given");
  probe_cmd->add_option("--theta", theta, "direction angle in radians (d = 1)");
  probe_cmd->add_option("--n", radii_count, "number of radii")->check(CLI::Range(2, 100000));
  probe_cmd->add_flag("--csv", as_csv, "emit CSV instead of JSON");
  probe_cmd->add_option("--out", out_path, "output path (default stdout)");

  // verify
  std::string experiment, config_text;
  std::optional<int> vd;
  std::optional<double> vs;
  auto* verify_cmd = app.add_subcommand("verify", "run an experiment and report its checks");
  verify_cmd->add_option("experiment", experiment, "experiment id")->required();
  verify_cmd->add_option("--d", vd, "dimension");
  verify_cmd->add_option("--s", vs, "smoothness");
  verify_cmd->add_option("--config", config_text, "config JSON or @file");
  verify_cmd->add_option("--out", out_path, "report path (default stdout)");
  verify_cmd->add_option("--csv", csv_path, "companion CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (threads > 0) set_thread_count(threads);

    if (kernel_cmd->parsed()) as_csv = !kernel_json;

    if (capacity_cmd->parsed() || energy_cmd->parsed() || potential_cmd->parsed()) {
      const auto set = read_set(set_text);
      set.validate();
      const auto spec = spec_flags.resolve(set.dimension());
      const auto flavor = parse_flavor(flavor_name);
      json config = {{"set", to_json(set)}, {"spec", spec_json(spec)}, {"flavor", to_string(flavor)},
                     {"mesh", mesh}};
      const auto cx = discretize(set, spec, mesh);
      const auto m = build_energy_matrix(cx, spec, flavor);

      if (energy_cmd->parsed()) {
        std::vector<double> w = normalized_masses(cx);
        config["weights"] = weights_text.empty() ? json("cell-masses") : json("explicit");
        if (!weights_text.empty()) {
          const auto j = read_json_arg(weights_text);
          if (!j.is_array()) throw ConfigError("--weights must be a JSON array");
          w = j.get<std::vector<double>>();
          if (w.size() != cx.size()) {
            throw ConfigError("--weights needs " + std::to_string(cx.size()) + " entries");
          }
          for (double x : w) {
            if (!(x >= 0.0)) throw ConfigError("--weights must be nonnegative");
          }
        }
        const json outj = {{"config", config}, {"cells", cx.size()}, {"energy", energy(m, w)}};
        emit(dump17(outj), out_path);
        return kExitOk;
      }

      config["tol"] = tol;
      config["maxIter"] = max_iter;
      const auto r = equilibrium(m, tol, max_iter, normalized_masses(cx));
      auto result = r;
      result.mesh = mesh;
      if (capacity_cmd->parsed()) {
        json outj = to_json(result);
        outj["config"] = config;
        emit(dump17(outj), out_path);
        if (!csv_path.empty()) {
          std::ostringstream csv;
          csv << "cell,weight\n";
          for (std::size_t i = 0; i < r.weights.size(); ++i) csv << i << ',' << fmt17(r.weights[i]) << '\n';
          emit(csv_with_config(config, csv.str()), csv_path);
        }
        return r.certified ? kExitOk : kExitUncertified;
      }
      const auto check = equilibrium_potential_check(result, cx, spec);
      json outj = to_json(check);
      outj["config"] = config;
      outj["equilibrium"] = to_json(result);
      emit(dump17(outj), out_path);
      return r.certified && check.frostman_ok ? kExitOk : kExitUncertified;
    }

    if (kernel_cmd->parsed() || pick_cmd->parsed()) {
      const auto spec = spec_flags.resolve();
      SeriesCoefficients coeffs;
      const int terms = kernel_cmd->parsed() ? count - 1 : count;
      const int N = std::max(terms, 1);
      if (space == "da") {
        coeffs = series_coefficients_da(spec.a, N);
      } else if (space == "modified-log") {
        coeffs = series_coefficients_modified_log(N);
      } else if (space == "hs") {
        coeffs = series_coefficients_hs(spec.d, spec.s, N);
      } else {
        throw ConfigError("unknown --space '" + space + "'");
      }
      json config = {{"spec", spec_json(spec)}, {"space", coeffs.space}, {"n", count}};
      if (kernel_cmd->parsed()) {
        if (as_csv) {
          std::ostringstream csv;
          csv << "n,a_n\n";
          for (int n = 0; n < count; ++n) csv << n << ',' << fmt17(coeffs[n]) << '\n';
          emit(csv_with_config(config, csv.str()), out_path);
        } else {
          std::vector<double> v(coeffs.values.begin(), coeffs.values.begin() + count);
          emit(dump17({{"config", config}, {"coefficients", v}}), out_path);
        }
        return kExitOk;
      }
      const auto b = pick_coefficients(coeffs, count);
      int first_negative = 0;
      for (int n = 1; n <= count && first_negative == 0; ++n) {
        if (b[n - 1] < 0.0) first_negative = n;
      }
      if (as_csv) {
        std::ostringstream csv;
        csv << "n,b_n\n";
        for (int n = 1; n <= count; ++n) csv << n << ',' << fmt17(b[n - 1]) << '\n';
        emit(csv_with_config(config, csv.str()), out_path);
      } else {
        emit(dump17({{"config", config}, {"b", b}, {"firstNegative", first_negative},
                     {"pick", first_negative == 0}}),
             out_path);
      }
      return kExitOk;
    }

    if (probe_cmd->parsed()) {
      if (measure_text.empty() == set_text.empty()) throw ConfigError("give exactly one of --measure, --set");
      AtomicMeasure mu;
      json config;
      int dim = 1;
      if (!measure_text.empty()) {
        try {
          mu = measure_from_json(read_json_arg(measure_text));
        } catch (const ConstructionError& e) {
          throw ConfigError(std::string("bad --measure: ") + e.what());
        }
        dim = std::max(1, mu.dimension());
        config["measure"] = to_json(mu);
      }
      KernelSpec spec = spec_flags.resolve(dim);
      if (!set_text.empty()) {
        const auto set = read_set(set_text);
        set.validate();
        spec = spec_flags.resolve(set.dimension());
        const auto cx = discretize(set, spec, mesh);
        const auto r = equilibrium(build_energy_matrix(cx, spec, EnergyFlavor::Da), tol, kDefaultMaxIter,
                                   normalized_masses(cx));
        if (!r.certified) throw Error("equilibrium did not certify; raise --tol");
        std::vector<double> w = r.weights;
        for (auto& x : w) x *= r.capacity();
        mu = AtomicMeasure::from_cells(cx, w);
        config["set"] = to_json(set);
        config["mesh"] = mesh;
        config["tol"] = tol;
      }
      if (spec.d != 1) throw ConfigError("probe directions are given by --theta and need d = 1");
      config["spec"] = spec_json(spec);
      config["theta"] = theta;
      config["n"] = radii_count;
      const auto radii = default_probe_radii(radii_count);
      const auto values = radial_probe(spec, mu, BoundaryPoint::on_circle(theta), radii);
      if (as_csv) {
        emit(csv_with_config(config, probe_csv(radii, values)), out_path);
      } else {
        json rows = json::array();
        for (std::size_t i = 0; i < radii.size(); ++i) {
          rows.push_back({radii[i], values[i].real(), values[i].imag()});
        }
        emit(dump17({{"config", config}, {"columns", {"r", "re", "im"}}, {"values", rows}}), out_path);
      }
      return kExitOk;
    }

    if (verify_cmd->parsed()) {
      ExperimentConfig cfg;
      if (!config_text.empty()) {
        auto j = read_json_arg(config_text);
        if (!j.contains("id")) j["id"] = experiment;
        if (j.at("id") != experiment) throw ConfigError("--config id disagrees with the experiment");
        if (vd) j["d"] = *vd;
        if (vs) j["s"] = *vs;
        cfg = config_from_json(j);
      } else {
        cfg = default_config(experiment, vd.value_or(1), vs.value_or(0.5));
      }
      const auto report = run_experiment(cfg);
      emit(dump17(report.json), out_path);
      if (!csv_path.empty()) emit(report.csv, csv_path);
      return report.passed ? kExitOk : kExitUncertified;
    }
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
