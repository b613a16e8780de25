// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
// Usage: acceptance [report-dir]   (writes <id>.json and <id>.csv when given)

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "capball/experiments.hpp"

using namespace capball;

namespace {

struct Criterion {
  int number;
  std::string name;
  double budget_seconds;
  std::vector<ExperimentConfig> configs;
  std::function<std::string(const std::vector<Report>&)> summary;
};

std::string g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string out_dir = argc > 1 ? argv[1] : "";
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  std::vector<Criterion> criteria;
  criteria.push_back({1, "identity suite", 10.0, {default_config("identities")}, [](const auto& r) {
                        return "worst pairing " + g(r[0].json["worstPairing"]) + ", worst energy " +
                               g(r[0].json["worstEnergy"]) + " (< 1e-10, N = 512, 100 cases)";
                      }});
  criteria.push_back({2, "full-circle anchor", 30.0, {default_config("anchor")}, [](const auto& r) {
                        const auto& j = r[0].json;
                        return "capacity " + g(j["result"]["capacity"]) + ", bracket " + g(j["bracket"]) +
                               ", weight deviation " + g(j["uniformDeviation"]);
                      }});
  criteria.push_back({3, "comparability", 300.0,
                      {default_config("comparability", 1, 0.5), default_config("comparability", 2, 0.75),
                       default_config("comparability", 2, 1.0)},
                      [](const auto& r) {
                        std::string s;
                        for (const auto& x : r) {
                          const auto& j = x.json;
                          s += "(d=" + std::to_string(j["spec"]["d"].template get<int>()) + ", s=" +
                               g(j["spec"]["s"]) + ") c2/c1 " + g(j["kernelWindow"]["ratio"]) + " energy [" +
                               g(j["energyRatios"]["min"]) + ", " + g(j["energyRatios"]["max"]) + "] in [" +
                               g(j["kernelWindow"]["c1"]) + ", " + g(j["kernelWindow"]["c2"]) + "]; ";
                        }
                        return s + "bound 50";
                      }});
  criteria.push_back({4, "extremal audit", 120.0, {default_config("extremal-audit")}, [](const auto& r) {
                        double lo = 1e300, hi = 0.0;
                        for (const auto& row : r[0].json["rows"]) {
                          if (row["family"] != "arc") continue;
                          lo = std::min(lo, row["normOverCapacity"].template get<double>());
                          hi = std::max(hi, row["normOverCapacity"].template get<double>());
                        }
                        return "norm^2/cap in [" + g(lo) + ", " + g(hi) + "] within [0.5, 2]; floor >= 0.5 median; sup <= 3 median";
                      }});
  criteria.push_back({5, "pick and regularity", 1.0, {default_config("pick-regularity")}, [](const auto& r) {
                        std::string s = "first negative b_n:";
                        int settled = 0;
                        for (const auto& sp : r[0].json["spaces"]) {
                          s += " " + sp["space"].template get<std::string>() + "(" + g(sp["parameter"]) + ")=" +
                               std::to_string(sp["firstNegative"].template get<int>());
                          settled = std::max(settled, sp["ratioSettledAt"].template get<int>());
                        }
                        return s + " (0 = none to n = 200); ratios within 1e-2 by n = " + std::to_string(settled);
                      }});
  criteria.push_back({6, "monotonicity and refinement", 180.0, {default_config("capacity-battery")},
                      [](const auto& r) {
                        const auto& inc = r[0].json["refinementIncrements"];
                        return "arc increments " + g(inc["arc"][0]) + " " + g(inc["arc"][1]) + " " +
                               g(inc["arc"][2]) + ", cap increments " + g(inc["cap"][0]) + " " + g(inc["cap"][1]) +
                               " " + g(inc["cap"][2]);
                      }});
  criteria.push_back({7, "multiplier suite", 60.0, {default_config("multiplier")}, [](const auto& r) {
                        double c = 0.0;
                        for (const auto& row : r[0].json["rows"]) {
                          c = std::max(c, row["sectionOverSqrtSarason"].template get<double>());
                        }
                        std::string s = "section/sup windows";
                        for (const auto& w : r[0].json["sectionOverSupWindows"]) {
                          s += " a=" + g(w["a"]) + " [" + g(w["min"]) + ", " + g(w["max"]) + "]";
                        }
                        return s + "; max section/sqrt(max Re V) " + g(c) + " <= C = 10";
                      }});
  criteria.push_back({8, "oracle equivalence", 30.0, {default_config("oracle")}, [](const auto& r) {
                        double worst = 0.0;
                        for (const auto& row : r[0].json["rows"]) {
                          worst = std::max(worst, row["worst"].template get<double>());
                        }
                        return "worst relative FW/PG gap " + g(worst) + " (<= 1e-9, meshes <= 64)";
                      }});

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Report> reports;
    bool passed = true;
    std::string detail;
    try {
      for (const auto& cfg : c.configs) {
        reports.push_back(run_experiment(cfg));
        passed = passed && reports.back().passed;
        if (!out_dir.empty()) {
          const std::string stem = out_dir + "/" + cfg.id + (c.configs.size() > 1
                                                                  ? "-d" + std::to_string(cfg.d) + "-s" + g(cfg.s)
                                                                  : "");
          std::ofstream(stem + ".json") << reports.back().json.dump(2) << "\n";
          std::ofstream(stem + ".csv") << reports.back().csv;
        }
        if (!reports.back().passed) detail += "failed checks in " + cfg.id + ": " + reports.back().json["checks"].dump() + "; ";
      }
      detail += c.summary(reports);
    } catch (const std::exception& e) {
      passed = false;
      detail = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_seconds;
    if (!in_time) detail += "; over the " + g(c.budget_seconds) + " s budget";
    const bool ok = passed && in_time;
    failures += ok ? 0 : 1;
    std::printf("%s %d %s: %s [%.2f s]\n", ok ? "PASS" : "FAIL", c.number, c.name.c_str(), detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
