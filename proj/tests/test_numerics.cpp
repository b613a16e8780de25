#include <cmath>

#include "capball/numerics.hpp"
#include "doctest.h"

using namespace capball::numerics;

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {1, 2, 5, 16, 64}) {
    const auto& g = gauss_legendre(n);
    for (int deg = 0; deg < 2 * n; deg += 1) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("singular integrators") {
  // int_0^1 x^{-1/2} = 2, int_0^1 log x = -1
  CHECK(integrate_singular_left([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 16) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(integrate_singular_left([](double x) { return std::log(x); }, 0.0, 1.0, 16) ==
        doctest::Approx(-1.0).epsilon(1e-11));
  // x^{-1/2} (1-x)^{-1/2} over [0,1] = pi
  CHECK(integrate_singular_both([](double x) { return 1.0 / std::sqrt(x * (1.0 - x)); }, 0.0,
                                1.0, 16) == doctest::Approx(kPi).epsilon(1e-11));
  CHECK(integrate_gauss([](double x) { return std::exp(x); }, 0.0, 1.0, 10, 3) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("hypergeometric 2F1(a,b;1;x)") {
  // reference: direct series, slow but fine for x <= 0.9
  auto series = [](double a, double b, double x) {
    double term = 1.0, sum = 1.0;
    for (int n = 0; n < 20000; ++n) {
      term *= (a + n) * (b + n) / ((n + 1.0) * (n + 1.0)) * x;
      sum += term;
      if (std::abs(term) < 1e-18) break;
    }
    return sum;
  };
  for (double a : {0.1, 0.25, 0.5, 0.375}) {
    Hyp2F1Unit h(a, a);
    for (double x : {0.0, 0.3, 0.5, 0.6, 0.8, 0.9}) {
      CHECK(h(x) == doctest::Approx(series(a, a, x)).epsilon(1e-12));
    }
  }
  // a + b = 1: 2F1(1/2,1/2;1;x) = (2/pi) K(k^2 = x); K(0.5) = 1.8540746773013719
  CHECK(hyp2f1_c1(0.5, 0.5, 0.5) == doctest::Approx(2.0 / kPi * 1.8540746773013719));
  CHECK(hyp2f1_c1(0.5, 0.5, 0.99) ==
        doctest::Approx(2.0 / kPi * 3.6956373629898742).epsilon(1e-12));
}

TEST_CASE("counter rng is a pure function of (seed, counter)") {
  CounterRng a(7), b(7), c(8);
  CHECK(a.bits(123) == b.bits(123));
  CHECK(a.bits(123) != c.bits(123));
  double mean = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = a.next_uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    mean += u;
  }
  CHECK(mean / 10000 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("compensated sum and linear fit") {
  std::vector<double> xs{1e16, 1.0, -1e16, 1.0};
  CHECK(compensated_sum(xs) == 2.0);
  std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  auto [slope, icpt] = linear_fit(x, y);
  CHECK(slope == doctest::Approx(2.0));
  CHECK(icpt == doctest::Approx(1.0));
}
