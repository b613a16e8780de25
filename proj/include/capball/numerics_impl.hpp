#pragma once

#include <cmath>

namespace capball::numerics {

template <class F>
double integrate_gauss(F&& f, double lo, double hi, int order, int panels) {
  const GaussRule& g = gauss_legendre(order);
  const double width = (hi - lo) / panels;
  CompensatedSum total;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * width;
    const double half = 0.5 * width;
    const double mid = a + half;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      total.add(half * g.weights[i] * f(mid + half * g.nodes[i]));
    }
  }
  return total.value();
}

template <class G>
double integrate_singular_offset(G&& g, double length, int order, double inner_fraction,
                                 double ratio, double grading) {
  if (!(length > 0.0)) return 0.0;
  const GaussRule& rule = gauss_legendre(order);
  CompensatedSum total;
  double upper = length;
  // geometric panels [upper*ratio, upper]
  while (upper > length * inner_fraction) {
    const double lower = upper * ratio;
    const double half = 0.5 * (upper - lower);
    const double mid = lower + half;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      total.add(half * rule.weights[i] * g(mid + half * rule.nodes[i]));
    }
    upper = lower;
  }
  // innermost panel [0, upper], u = upper * t^m
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = 0.5 * (rule.nodes[i] + 1.0);
    const double jac = upper * grading * std::pow(t, grading - 1.0);
    total.add(0.5 * rule.weights[i] * jac * g(upper * std::pow(t, grading)));
  }
  return total.value();
}

template <class F>
double integrate_singular_left(F&& f, double lo, double hi, int order, double inner_fraction,
                               double ratio, double grading) {
  return integrate_singular_offset([&](double u) { return f(lo + u); }, hi - lo, order,
                                   inner_fraction, ratio, grading);
}

template <class F>
double integrate_singular_both(F&& f, double lo, double hi, int order, double inner_fraction,
                               double ratio, double grading) {
  const double mid = 0.5 * (lo + hi);
  const double left = integrate_singular_left(f, lo, mid, order, inner_fraction, ratio, grading);
  // reflect the right half so its singular endpoint sits on the left
  auto reflected = [&](double x) { return f(lo + hi - x); };
  const double right =
      integrate_singular_left(reflected, lo, mid, order, inner_fraction, ratio, grading);
  return left + right;
}

}  // namespace capball::numerics
