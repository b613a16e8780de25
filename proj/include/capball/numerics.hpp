#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace capball::numerics {

inline constexpr double kPi = 3.14159265358979323846;

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached per order; safe to call concurrently.
const GaussRule& gauss_legendre(int order);

/// Neumaier-compensated accumulator. Summation order is the call order, so
/// results are reproducible for a fixed input sequence.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs);

/// Integrate f over [lo, hi] when f has an integrable power singularity
/// (or a logarithmic one) at `lo` and is smooth elsewhere. The interval is cut
/// into geometric panels toward `lo`, down to `lo + (hi-lo)*inner_fraction`,
/// and the innermost panel uses the substitution x = lo + h t^m.
template <class F>
double integrate_singular_left(F&& f, double lo, double hi, int order,
                               double inner_fraction = 1e-3, double ratio = 0.25,
                               double grading = 4.0);

/// int_0^length g(u) du with the singularity at u = 0. g receives the offset
/// itself, so callers can evaluate near the singular point without
/// cancellation.
template <class G>
double integrate_singular_offset(G&& g, double length, int order, double inner_fraction = 1e-3,
                                 double ratio = 0.25, double grading = 4.0);
/// Nodes (offsets in (0, length]) and weights of the rule used by
/// integrate_singular_offset, for callers that reuse the nodes across integrands.
GaussRule singular_offset_rule(double length, int order, double inner_fraction = 1e-3,
                               double ratio = 0.25, double grading = 4.0);

/// Same as integrate_singular_left, but with integrable singular behaviour at both endpoints.
template <class F>
double integrate_singular_both(F&& f, double lo, double hi, int order,
                               double inner_fraction = 1e-3, double ratio = 0.25,
                               double grading = 4.0);

/// Plain composite Gauss-Legendre with `panels` equal panels.
template <class F>
double integrate_gauss(F&& f, double lo, double hi, int order, int panels = 1);

/// Gauss hypergeometric 2F1(a, b; 1; x) for real 0 <= x < 1, the case needed
/// for circle averages of power kernels. Direct series for x <= 1/2, the
/// connection formula around x = 1 above that (logarithmic form when
/// a + b = 1). Gamma factors are computed once per (a, b).
class Hyp2F1Unit {
 public:
  Hyp2F1Unit(double a, double b);
  double operator()(double x) const;
  /// Same with 1 - x supplied separately, for x close to 1.
  double eval(double x, double one_minus_x) const;

 private:
  double a_;
  double b_;
  double gap_;
  bool log_case_;
  double g1_ = 0.0;
  double g2_ = 0.0;
  double log_pref_ = 0.0;
  double psia_ = 0.0;
  double psib_ = 0.0;
};

inline double hyp2f1_c1(double a, double b, double x) { return Hyp2F1Unit(a, b)(x); }

double digamma(double x);

/// Counter-based generator: value i of stream `seed` is a pure function of
/// (seed, i). SplitMix64 finalizer applied to seed * golden + counter.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}
  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const;
  /// Sequential convenience interface.
  double next_uniform() { return uniform(counter_++); }
  double next_normal();
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

/// Least-squares slope and intercept of y against x.
std::pair<double, double> linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace capball::numerics

#include "capball/numerics_impl.hpp"
