#include "capball/numerics.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace capball::numerics {

namespace {

GaussRule compute_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 2.0;
    return rule;
  }
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) <= 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_gauss_legendre(order)).first;
  return it->second;
}

GaussRule singular_offset_rule(double length, int order, double inner_fraction, double ratio,
                               double grading) {
  GaussRule out;
  if (!(length > 0.0)) return out;
  const GaussRule& rule = gauss_legendre(order);
  double upper = length;
  while (upper > length * inner_fraction) {
    const double lower = upper * ratio;
    const double half = 0.5 * (upper - lower);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      out.nodes.push_back(lower + half + half * rule.nodes[i]);
      out.weights.push_back(half * rule.weights[i]);
    }
    upper = lower;
  }
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = 0.5 * (rule.nodes[i] + 1.0);
    out.nodes.push_back(upper * std::pow(t, grading));
    out.weights.push_back(0.5 * rule.weights[i] * upper * grading * std::pow(t, grading - 1.0));
  }
  return out;
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

double digamma(double v) {
  double r = 0.0;
  while (v < 16.0) {
    r -= 1.0 / v;
    v += 1.0;
  }
  const double inv = 1.0 / v;
  const double inv2 = inv * inv;
  return r + std::log(v) - 0.5 * inv -
         inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 / 240)));
}

Hyp2F1Unit::Hyp2F1Unit(double a, double b)
    : a_(a), b_(b), gap_(1.0 - a - b), log_case_(std::abs(1.0 - a - b) < 1e-12) {
  if (a == 0.0 || b == 0.0) return;
  if (log_case_) {
    log_pref_ = 1.0 / (std::tgamma(a) * std::tgamma(b));
    psia_ = digamma(a);
    psib_ = digamma(b);
  } else {
    g1_ = std::tgamma(gap_) / (std::tgamma(1.0 - a) * std::tgamma(1.0 - b));
    g2_ = std::tgamma(-gap_) / (std::tgamma(a) * std::tgamma(b));
  }
}

namespace {

double gauss_series(double a, double b, double c, double z) {
  double term = 1.0;
  double sum = 1.0;
  for (int n = 0; n < 100000; ++n) {
    term *= (a + n) * (b + n) / ((n + 1.0) * (c + n)) * z;
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

double Hyp2F1Unit::operator()(double x) const { return eval(x, 1.0 - x); }

double Hyp2F1Unit::eval(double x, double y) const {
  if (x < 0.0 || !(y > 0.0)) return std::nan("");
  if (a_ == 0.0 || b_ == 0.0) return 1.0;
  if (x <= 0.5) return gauss_series(a_, b_, 1.0, x);
  if (!log_case_) {
    return g1_ * gauss_series(a_, b_, 1.0 - gap_, y) +
           std::pow(y, gap_) * g2_ * gauss_series(1.0 - a_, 1.0 - b_, 1.0 + gap_, y);
  }
  // c = a + b
  double coef = 1.0;
  double psi1 = -0.57721566490153286061;
  double psia = psia_;
  double psib = psib_;
  const double logy = std::log(y);
  double sum = 0.0;
  double ypow = 1.0;
  for (int n = 0; n < 100000; ++n) {
    const double term = coef * (2.0 * psi1 - psia - psib - logy) * ypow;
    sum += term;
    if (n > 2 && std::abs(term) <= 1e-17 * std::abs(sum)) break;
    coef *= (a_ + n) * (b_ + n) / ((n + 1.0) * (n + 1.0));
    psi1 += 1.0 / (n + 1.0);
    psia += 1.0 / (a_ + n);
    psib += 1.0 / (b_ + n);
    ypow *= y;
  }
  return log_pref_ * sum;
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  std::uint64_t z = seed_ * 0x9E3779B97F4A7C15ULL + counter * 0xBF58476D1CE4E5B9ULL +
                    0x94D049BB133111EBULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double CounterRng::uniform(std::uint64_t counter) const {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

double CounterRng::next_normal() {
  // Box-Muller on two consecutive counters
  double u1 = next_uniform();
  const double u2 = next_uniform();
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

std::pair<double, double> linear_fit(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace capball::numerics
