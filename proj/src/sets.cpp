#include "capball/sets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "capball/errors.hpp"
#include "capball/numerics.hpp"

namespace capball {

using numerics::kPi;

namespace {

constexpr double kTwoPi = 2.0 * kPi;
constexpr double kMembershipTol = 1e-12;
constexpr int kMaxCantorDepth = 30;

double wrap_angle(double t) {
  double r = std::fmod(t, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

}  // namespace

SetSpec SetSpec::arc(double theta0, double theta1) {
  SetSpec s;
  s.kind = SetKind::Arc;
  s.theta0 = theta0;
  s.theta1 = theta1;
  s.validate();
  return s;
}

SetSpec SetSpec::cap(BoundaryPoint center, double delta) {
  SetSpec s;
  s.kind = SetKind::Cap;
  s.center = std::move(center);
  s.delta = delta;
  s.validate();
  return s;
}

SetSpec SetSpec::union_of(std::vector<SetSpec> members) {
  SetSpec s;
  s.kind = SetKind::Union;
  s.members = std::move(members);
  s.validate();
  return s;
}

SetSpec SetSpec::cantor(double theta0, double theta1, std::vector<double> ratios, int depth) {
  SetSpec s;
  s.kind = SetKind::Cantor;
  s.theta0 = theta0;
  s.theta1 = theta1;
  s.ratios = std::move(ratios);
  s.depth = depth;
  s.validate();
  return s;
}

int SetSpec::dimension() const {
  switch (kind) {
    case SetKind::Arc:
    case SetKind::Cantor:
      return 1;
    case SetKind::Cap:
      return center ? center->dim() : 0;
    case SetKind::Union:
      return members.empty() ? 0 : members.front().dimension();
  }
  return 0;
}

void SetSpec::validate() const {
  switch (kind) {
    case SetKind::Arc:
    case SetKind::Cantor:
      if (!std::isfinite(theta0) || !std::isfinite(theta1)) {
        throw ConstructionError("arc endpoints must be finite");
      }
      if (!(theta0 < theta1) || theta1 - theta0 > kTwoPi * (1.0 + 1e-12)) {
        throw ConstructionError("arc needs theta0 < theta1 <= theta0 + 2 pi");
      }
      if (kind == SetKind::Cantor) {
        if (ratios.empty()) throw ConstructionError("cantor set needs a ratio schedule");
        for (double r : ratios) {
          if (!(r > 0.0 && r <= 0.5)) {
            throw ConstructionError("cantor ratios must lie in (0, 1/2]");
          }
        }
        if (depth < 0 || depth > kMaxCantorDepth) {
          throw ConstructionError("cantor depth out of range");
        }
      }
      return;
    case SetKind::Cap:
      if (!center) throw ConstructionError("cap needs a center");
      if (!(delta > 0.0) || delta > std::sqrt(2.0) * (1.0 + 1e-12)) {
        throw ConstructionError("cap radius must lie in (0, sqrt 2]");
      }
      return;
    case SetKind::Union: {
      if (members.empty()) throw ConstructionError("union needs at least one member");
      const int d = members.front().dimension();
      for (const auto& m : members) {
        m.validate();
        if (m.dimension() != d) throw ConstructionError("union members differ in dimension");
      }
      return;
    }
  }
}

nlohmann::json to_json(const SetSpec& set) {
  nlohmann::json j;
  switch (set.kind) {
    case SetKind::Arc:
      j["variant"] = "arc";
      j["theta0"] = set.theta0;
      j["theta1"] = set.theta1;
      break;
    case SetKind::Cap:
      j["variant"] = "cap";
      j["center"] = set.center->to_real();
      j["delta"] = set.delta;
      break;
    case SetKind::Union: {
      j["variant"] = "union";
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& m : set.members) arr.push_back(to_json(m));
      j["members"] = arr;
      break;
    }
    case SetKind::Cantor:
      j["variant"] = "cantor";
      j["theta0"] = set.theta0;
      j["theta1"] = set.theta1;
      j["ratios"] = set.ratios;
      j["depth"] = set.depth;
      break;
  }
  return j;
}

SetSpec set_from_json(const nlohmann::json& j) {
  try {
    const std::string v = j.at("variant").get<std::string>();
    if (v == "arc") return SetSpec::arc(j.at("theta0").get<double>(), j.at("theta1").get<double>());
    if (v == "cap") {
      return SetSpec::cap(BoundaryPoint::from_real(j.at("center").get<std::vector<double>>()),
                          j.at("delta").get<double>());
    }
    if (v == "union") {
      std::vector<SetSpec> members;
      for (const auto& m : j.at("members")) members.push_back(set_from_json(m));
      return SetSpec::union_of(std::move(members));
    }
    if (v == "cantor") {
      return SetSpec::cantor(j.at("theta0").get<double>(), j.at("theta1").get<double>(),
                             j.at("ratios").get<std::vector<double>>(), j.at("depth").get<int>());
    }
    throw ConstructionError("unknown set variant '" + v + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConstructionError(std::string("malformed set JSON: ") + e.what());
  }
}

namespace {

std::vector<double> split_numbers(const std::string& text, std::string& head) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.empty()) throw ConstructionError("empty set description");
  head = parts.front();
  std::vector<double> values;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(parts[i], &used);
    } catch (const std::exception&) {
      throw ConstructionError("not a number in set description: '" + parts[i] + "'");
    }
    if (used != parts[i].size()) {
      throw ConstructionError("not a number in set description: '" + parts[i] + "'");
    }
    values.push_back(v);
  }
  return values;
}

}  // namespace

SetSpec parse_set(const std::string& text) {
  if (text.find('+') != std::string::npos) {
    std::vector<SetSpec> members;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, '+')) members.push_back(parse_set(item));
    return SetSpec::union_of(std::move(members));
  }
  std::string head;
  const auto v = split_numbers(text, head);
  if (head == "arc") {
    if (v.size() != 2) throw ConstructionError("arc takes arc:theta0:theta1");
    return SetSpec::arc(v[0], v[1]);
  }
  if (head == "circle") {
    if (!v.empty()) throw ConstructionError("circle takes no arguments");
    return SetSpec::full_circle();
  }
  if (head == "cap") {
    if (v.size() < 3 || v.size() % 2 != 1) {
      throw ConstructionError("cap takes cap:re:im[:re:im...]:delta");
    }
    std::vector<double> coords(v.begin(), v.end() - 1);
    return SetSpec::cap(BoundaryPoint::from_real(coords), v.back());
  }
  if (head == "cantor") {
    if (v.size() < 4) throw ConstructionError("cantor takes cantor:theta0:theta1:depth:r1[:r2...]");
    if (v[2] != std::floor(v[2])) throw ConstructionError("cantor depth must be an integer");
    return SetSpec::cantor(v[0], v[1], std::vector<double>(v.begin() + 3, v.end()),
                           static_cast<int>(v[2]));
  }
  throw ConstructionError("unknown set kind '" + head + "'");
}

namespace {

void cantor_intervals(double start, double length, const std::vector<double>& ratios, int level,
                      int depth, std::vector<std::pair<double, double>>& out) {
  if (level == depth) {
    out.emplace_back(start, length);
    return;
  }
  const double r = ratios[std::min<std::size_t>(level, ratios.size() - 1)];
  const double child = r * length;
  cantor_intervals(start, child, ratios, level + 1, depth, out);
  cantor_intervals(start + length - child, child, ratios, level + 1, depth, out);
}

void collect_arcs(const SetSpec& set, std::vector<std::pair<double, double>>& out) {
  switch (set.kind) {
    case SetKind::Arc:
      out.emplace_back(set.theta0, std::min(set.theta1 - set.theta0, kTwoPi));
      return;
    case SetKind::Cap: {
      const double half = set.delta * set.delta >= 2.0
                              ? kPi
                              : 2.0 * std::asin(0.5 * set.delta * set.delta);
      out.emplace_back(std::arg((*set.center)[0]) - half, 2.0 * half);
      return;
    }
    case SetKind::Union:
      for (const auto& m : set.members) collect_arcs(m, out);
      return;
    case SetKind::Cantor:
      cantor_intervals(set.theta0, set.theta1 - set.theta0, set.ratios, 0, set.depth, out);
      return;
  }
}

}  // namespace

std::vector<std::pair<double, double>> circle_arcs(const SetSpec& set) {
  if (set.dimension() != 1) throw DomainError("circle_arcs needs a d = 1 set");
  std::vector<std::pair<double, double>> raw;
  collect_arcs(set, raw);
  for (const auto& [start, length] : raw) {
    if (length >= kTwoPi) return {{wrap_angle(raw.front().first), kTwoPi}};
  }
  if (raw.size() == 1) return {{wrap_angle(raw[0].first), raw[0].second}};
  for (auto& a : raw) a.first = wrap_angle(a.first);
  std::stable_sort(raw.begin(), raw.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<std::pair<double, double>> merged;
  for (const auto& a : raw) {
    if (!merged.empty()) {
      auto& last = merged.back();
      const double end = last.first + last.second;
      if (a.first <= end) {
        last.second = std::max(end, a.first + a.second) - last.first;
        continue;
      }
    }
    merged.push_back(a);
  }
  // wrap-around overlap between the last and the first arc
  while (merged.size() > 1) {
    const auto& last = merged.back();
    auto& first = merged.front();
    const double last_end = last.first + last.second - kTwoPi;
    if (last_end < first.first) break;
    const double new_end = std::max(first.first + first.second, last_end);
    first = {last.first, new_end + kTwoPi - last.first};
    merged.pop_back();
    // keep ordering by start: move the combined arc to the back
    std::rotate(merged.begin(), merged.begin() + 1, merged.end());
  }
  for (const auto& a : merged) {
    if (a.second >= kTwoPi) return {{a.first, kTwoPi}};
  }
  return merged;
}

bool set_contains(const SetSpec& set, const BoundaryPoint& z) {
  if (z.dim() != set.dimension()) throw DomainError("point dimension does not match set");
  switch (set.kind) {
    case SetKind::Cap:
      return std::abs(1.0 - hermitian_inner(z, *set.center)) <=
             set.delta * set.delta + kMembershipTol;
    case SetKind::Union:
      return std::any_of(set.members.begin(), set.members.end(),
                         [&](const SetSpec& m) { return set_contains(m, z); });
    case SetKind::Arc:
    case SetKind::Cantor: {
      const double phi = std::arg(z[0]);
      for (const auto& [start, length] : circle_arcs(set)) {
        const double u = wrap_angle(phi - start);
        if (u <= length + kMembershipTol || u >= kTwoPi - kMembershipTol) return true;
      }
      return false;
    }
  }
  return false;
}

double CellComplex::total_mass() const {
  numerics::CompensatedSum s;
  for (const auto& c : cells) s.add(c.mass);
  return s.value();
}

}  // namespace capball
