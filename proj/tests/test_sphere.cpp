#include <cmath>

#include "capball/errors.hpp"
#include "capball/numerics.hpp"
#include "capball/sphere.hpp"
#include "doctest.h"

using namespace capball;
using numerics::kPi;

namespace {
BoundaryPoint random_point(numerics::CounterRng& rng, int d) {
  std::vector<cplx> c(d);
  for (auto& x : c) x = cplx(rng.next_normal(), rng.next_normal());
  return BoundaryPoint(c);
}
}  // namespace

TEST_CASE("boundary points") {
  BoundaryPoint p({cplx(3, 0), cplx(0, 4)});
  CHECK(std::abs(p[0] - 0.6) < 1e-15);
  CHECK(std::abs(p[1] - cplx(0, 0.8)) < 1e-15);
  CHECK_THROWS_AS(BoundaryPoint({cplx(0, 0)}), ConstructionError);
  CHECK_THROWS_AS(BoundaryPoint({cplx(NAN, 0)}), ConstructionError);
  std::vector<double> re{0.0, 2.0};
  CHECK(std::abs(BoundaryPoint::from_real(re)[0] - cplx(0, 1)) < 1e-15);
}

TEST_CASE("hermitian inner product and koranyi distance") {
  auto e1 = BoundaryPoint::basis(2, 0), e2 = BoundaryPoint::basis(2, 1);
  CHECK(hermitian_inner(e1, e1) == cplx(1, 0));
  CHECK(hermitian_inner(e1, e2) == cplx(0, 0));
  auto one = BoundaryPoint::on_circle(0), minus = BoundaryPoint::on_circle(kPi);
  CHECK(std::abs(hermitian_inner(one, minus) + 1.0) < 1e-15);
  CHECK(koranyi_distance(one, one) == 0.0);
  CHECK(koranyi_distance(one, minus) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(koranyi_distance(one, BoundaryPoint::on_circle(0.5 * kPi)) ==
        doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-15));
}

TEST_CASE("koranyi triangle inequality on random triples") {
  numerics::CounterRng rng(11);
  for (int d = 1; d <= 3; ++d) {
    for (int i = 0; i < 300; ++i) {
      auto x = random_point(rng, d), y = random_point(rng, d), z = random_point(rng, d);
      CHECK(koranyi_distance(x, z) <= koranyi_distance(x, y) + koranyi_distance(y, z) + 1e-12);
      CHECK(std::abs(hermitian_inner(x, y)) <= 1.0 + 1e-12);
      CHECK(koranyi_distance(x, y) == doctest::Approx(koranyi_distance(y, x)).epsilon(1e-15));
    }
  }
}

TEST_CASE("quadrature rules") {
  auto r4 = make_quadrature(1, 4);
  CHECK(r4.size() == 4);
  CHECK(std::abs(r4.nodes[1][0] - cplx(0, 1)) < 1e-15);
  CHECK(std::abs(r4.nodes[2][0] + 1.0) < 1e-15);
  CHECK(r4.weights[3] == 0.25);
  for (int d = 1; d <= 3; ++d) {
    auto r = make_quadrature(d, d == 1 ? 64 : 6);
    r.validate();
    CHECK(integrate(r, [](const BoundaryPoint&) { return 1.0; }) ==
          doctest::Approx(1.0).epsilon(1e-13));
  }
  auto r256 = make_quadrature(1, 256);
  auto e1 = BoundaryPoint::basis(1, 0);
  CHECK(std::abs(integrate(r256, [&](const BoundaryPoint& z) {
          return hermitian_inner(z, e1).real();
        })) < 1e-12);
  CHECK_THROWS_AS(make_quadrature(4, 4), UnsupportedDimension);
  CHECK_THROWS_AS(make_quadrature(1, 0), ConfigError);
}

TEST_CASE("trigonometric exactness on the circle") {
  const int N = 32;
  auto r = make_quadrature(1, N);
  for (int k = -N + 1; k < N; ++k) {
    double re = integrate(r, [&](const BoundaryPoint& z) { return std::pow(z[0], k).real(); });
    CHECK(std::abs(re - (k == 0 ? 1.0 : 0.0)) < 1e-12);
  }
}

TEST_CASE("monomial moments on S^3 and S^5") {
  // int |z_1|^{2n} dsigma = n!(d-1)!/(n+d-1)!
  for (int d = 2; d <= 3; ++d) {
    auto r = make_quadrature(d, 8);
    double expected = 1.0;
    for (int n = 0; n <= 6; ++n) {
      if (n > 0) expected *= static_cast<double>(n) / (n + d - 1.0);
      double v = integrate(r, [&](const BoundaryPoint& z) { return std::pow(std::norm(z[0]), n); });
      CHECK(v == doctest::Approx(expected).epsilon(1e-12));
    }
    // mixed moment |z_1|^2 |z_2|^2 = (d-1)!/(d+1)!
    double mixed = integrate(r, [](const BoundaryPoint& z) { return std::norm(z[0]) * std::norm(z[1]); });
    CHECK(mixed == doctest::Approx(1.0 / (d * (d + 1.0))).epsilon(1e-12));
  }
}

TEST_CASE("koranyi ball measure") {
  auto r = make_quadrature(1, 1 << 14);
  auto c = BoundaryPoint::on_circle(0.3);
  CHECK(koranyi_ball_measure(c, std::sqrt(2.0), r) == doctest::Approx(1.0));
  double prev = 0.0;
  for (double delta : {0.1, 0.2, 0.4, 0.8, 1.2}) {
    double m = koranyi_ball_measure(c, delta, r);
    // arc |1 - e^{i theta}| <= delta^2, i.e. |theta| <= 2 asin(delta^2 / 2)
    double oracle = 2.0 * std::asin(delta * delta / 2.0) / kPi;
    CHECK(std::abs(m - oracle) <= 2.0 / r.size());
    CHECK(m >= prev);
    prev = m;
  }
  CHECK_THROWS_AS(koranyi_ball_measure(c, 0.0, r), DomainError);
}

TEST_CASE("koranyi scaling exponent") {
  std::vector<double> deltas;
  for (int i = 0; i < 8; ++i) deltas.push_back(0.05 * std::pow(10.0, i / 7.0));
  auto fit1 = fit_koranyi_scaling(BoundaryPoint::basis(1, 0), deltas, make_quadrature(1, 1 << 16));
  CHECK(fit1.exponent >= 2.0 * 0.95);
  CHECK(fit1.exponent <= 2.0 * 1.05);
  auto rule2 = make_product_quadrature_d2(512, 8192, 1);
  auto fit2 = fit_koranyi_scaling(BoundaryPoint::basis(2, 0), deltas, rule2);
  CHECK(fit2.exponent >= 4.0 * 0.95);
  CHECK(fit2.exponent <= 4.0 * 1.05);
}

TEST_CASE("quadrature json round trip") {
  auto r = make_quadrature(2, 3);
  auto back = quadrature_from_json(to_json(r));
  REQUIRE(back.size() == r.size());
  CHECK(back.d == 2);
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(back.weights[i] == r.weights[i]);
    CHECK(back.nodes[i] == r.nodes[i]);
  }
}
