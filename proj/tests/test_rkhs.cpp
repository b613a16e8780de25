#include <cmath>

#include "capball/errors.hpp"
#include "capball/numerics.hpp"
#include "capball/rkhs.hpp"
#include "doctest.h"

using namespace capball;
using numerics::kPi;

namespace {

AtomicMeasure random_circle_measure(numerics::CounterRng& rng, int n) {
  AtomicMeasure mu;
  for (int k = 0; k < n; ++k) {
    mu.atoms.push_back({BoundaryPoint::on_circle(2.0 * kPi * rng.next_uniform()), 0.1 + rng.next_uniform()});
  }
  mu.validate();
  return mu;
}

}  // namespace

TEST_CASE("moments") {
  const auto one = AtomicMeasure::point_mass(BoundaryPoint::on_circle(0.0));
  for (const auto& m : moments(one, 20).moments) CHECK(std::abs(m - 1.0) < 1e-15);
  const auto roots = AtomicMeasure::uniform_circle(8);
  const auto m = moments(roots, 40).moments;
  for (int n = 0; n <= 40; ++n) CHECK(std::abs(m[n] - (n % 8 == 0 ? 1.0 : 0.0)) < 1e-14);
  numerics::CounterRng rng(2);
  const auto mu = random_circle_measure(rng, 6);
  const auto mm = moments(mu, 30).moments;
  CHECK(std::abs(mm[0] - mu.total_mass()) < 1e-14);
  for (const auto& x : mm) CHECK(std::abs(x) <= mu.total_mass() * (1 + 1e-14));
  CHECK_THROWS_AS(moments(AtomicMeasure::point_mass(BoundaryPoint::basis(2, 0)), 4), UnsupportedDimension);
}

TEST_CASE("potential coefficients") {
  const auto one = AtomicMeasure::point_mass(BoundaryPoint::on_circle(0.0));
  const auto f1 = potential_coefficients(KernelSpec::from_a(1, 1.0), one, 50);
  for (const auto& c : f1.taylor) CHECK(std::abs(c - 1.0) < 1e-15);
  const auto f0 = potential_coefficients(KernelSpec::from_a(1, 0.0), one, 50);
  CHECK(std::abs(f0.taylor[0] - 1.0) < 1e-15);
  for (int n = 1; n <= 50; ++n) CHECK(std::abs(f0.taylor[n] - 1.0 / n) < 1e-15);
  const auto fz = potential_coefficients(KernelSpec::from_a(1, 0.5), AtomicMeasure{}, 10);
  for (const auto& c : fz.taylor) CHECK(c == cplx(0.0));

  numerics::CounterRng rng(4);
  for (double a : {0.0, 0.3, 0.8}) {
    const auto spec = KernelSpec::from_a(1, a);
    const auto mu = random_circle_measure(rng, 5);
    const auto f = potential_coefficients(spec, mu, 400);
    for (int k = 0; k < 20; ++k) {
      const cplx z = std::polar(0.9 * rng.next_uniform(), 2 * kPi * rng.next_uniform());
      const std::vector<cplx> zz{z};
      // tail <= M sum_{n > N} |z|^n
      const double tail = mu.total_mass() * std::pow(0.9, 401) / 0.1;
      CHECK(std::abs(f(z) - holo_potential(spec, mu, zz)) <= tail + 1e-12);
    }
  }
  CHECK_THROWS_AS(potential_coefficients(KernelSpec::from_a(2, 0.5), AtomicMeasure{}, 4), UnsupportedDimension);
}

TEST_CASE("norms and inner products") {
  const auto spec = KernelSpec::from_a(1, 0.4);
  const auto w = series_coefficients_da(0.4, 10);
  for (int n = 0; n <= 10; ++n) {
    std::vector<cplx> c(n + 1, 0.0);
    c[n] = 1.0;
    CHECK(norm_squared(coefficient_function(spec, c)) == doctest::Approx(1.0 / w[n]).epsilon(1e-14));
  }
  const auto hardy = KernelSpec::from_a(1, 1.0);
  CHECK(norm_squared(coefficient_function(hardy, {1.0, 0.5, 0.25})) == doctest::Approx(21.0 / 16.0).epsilon(1e-15));
  const auto f = coefficient_function(spec, {0.0, 2.0, 0.0, 0.0});
  const auto g = coefficient_function(spec, {0.0, 0.0, 0.0, cplx(0.0, 3.0)});
  const auto fg = coefficient_function(spec, {0.0, 2.0, 0.0, cplx(0.0, 3.0)});
  CHECK(std::abs(inner_product(f, g)) == 0.0);
  CHECK(norm_squared(fg) == doctest::Approx(norm_squared(f) + norm_squared(g)).epsilon(1e-15));
}

TEST_CASE("pairing on both paths") {
  const auto spec = KernelSpec::from_a(1, 0.5);
  numerics::CounterRng rng(8);
  const auto mu = random_circle_measure(rng, 5);
  const auto p1 = pairing(coefficient_function(spec, {1.0}), mu, 10);
  CHECK(std::abs(p1.integral - mu.total_mass()) < 1e-14);
  CHECK(std::abs(p1.inner - mu.total_mass()) < 1e-14);
  const auto zeta = BoundaryPoint::on_circle(1.1);
  const auto pz = pairing(coefficient_function(spec, {0.0, 1.0}), AtomicMeasure::point_mass(zeta), 10);
  CHECK(std::abs(pz.integral - zeta[0]) < 1e-15);
  CHECK(std::abs(pz.inner - zeta[0]) < 1e-15);
  for (int t = 0; t < 20; ++t) {
    std::vector<cplx> c(11);
    for (auto& x : c) x = {rng.next_normal(), rng.next_normal()};
    const auto r = pairing(coefficient_function(spec, c), random_circle_measure(rng, 5), 10);
    CHECK(r.discrepancy < 1e-12);
  }
  std::vector<cplx> big(12, 1.0);
  CHECK_THROWS_AS(pairing(coefficient_function(spec, big), mu, 10), DomainError);
  CHECK(to_json(p1).contains("discrepancy"));
}

TEST_CASE("energy identity") {
  const auto one = AtomicMeasure::point_mass(BoundaryPoint::on_circle(0.0));
  const auto r1 = energy_identity_check(KernelSpec::from_a(1, 1.0), one, 0.5);
  CHECK(r1.coefficient_path == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(r1.double_sum_path == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(r1.passed);

  AtomicMeasure pair;
  pair.atoms.push_back({BoundaryPoint::on_circle(0.0), 0.5});
  pair.atoms.push_back({BoundaryPoint::on_circle(kPi), 0.5});
  const auto r2 = energy_identity_check(KernelSpec::from_a(1, 0.0), pair, 0.9, 512);
  CHECK(r2.discrepancy < 1e-10);

  numerics::CounterRng rng(12);
  const auto mu = random_circle_measure(rng, 4);
  const auto r0 = energy_identity_check(KernelSpec::from_a(1, 0.3), mu, 0.0);
  CHECK(r0.coefficient_path == doctest::Approx(std::pow(mu.total_mass(), 2)).epsilon(1e-14));
  CHECK(r0.double_sum_path == doctest::Approx(std::pow(mu.total_mass(), 2)).epsilon(1e-14));

  for (int t = 0; t < 100; ++t) {
    const auto spec = KernelSpec::from_a(1, rng.next_uniform());
    const double r = 0.1 + 0.85 * rng.next_uniform();
    const auto m = random_circle_measure(rng, 1 + t % 7);
    const auto rep = energy_identity_check(spec, m, r, 512);
    CHECK(rep.passed);
  }
  CHECK_THROWS_AS(energy_identity_check(KernelSpec::from_a(1, 0.3), mu, 0.99, 16), ToleranceNotMet);
  CHECK(to_json(r1)["passed"].get<bool>());
}

TEST_CASE("multiplier norm sections") {
  const auto spec = KernelSpec::from_a(1, 0.5);
  std::vector<cplx> c(64, 0.0);
  c[0] = 1.0;
  const auto id = coefficient_function(spec, c);
  for (int M : {1, 8, 64}) CHECK(multiplier_norm_section(id, M) == doctest::Approx(1.0).epsilon(1e-13));

  std::vector<cplx> zc(64, 0.0);
  zc[1] = 1.0;
  const auto shift = coefficient_function(KernelSpec::from_a(1, 1.0), zc);
  CHECK(multiplier_norm_section(shift, 64) == doctest::Approx(1.0).epsilon(1e-13));

  CoefficientFunction dir;
  dir.taylor = zc;
  dir.space = series_coefficients_modified_log(64);
  double prev = 0.0;
  for (int M : {2, 4, 16, 64}) {
    const double v = multiplier_norm_section(dir, M);
    CHECK(v > 1.0);
    CHECK(v < 2.0);
    CHECK(v >= prev - 1e-14);
    prev = v;
  }
  CHECK_THROWS_AS(multiplier_norm_section(dir, 65), DomainError);

  numerics::CounterRng rng(6);
  std::vector<cplx> rc(40);
  for (auto& x : rc) x = {rng.next_normal() / 4.0, rng.next_normal() / 4.0};
  const auto phi = coefficient_function(spec, rc);
  prev = 0.0;
  for (int M = 1; M <= 40; ++M) {
    const double v = multiplier_norm_section(phi, M);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
}

TEST_CASE("Sarason function from coefficients") {
  numerics::CounterRng rng(15);
  for (double a : {0.0, 0.5, 1.0}) {
    const auto spec = KernelSpec::from_a(1, a);
    const auto mu = random_circle_measure(rng, 4);
    const double r = 0.7;
    auto phi = potential_coefficients(spec, mu, 300);
    double rn = 1.0;
    for (auto& x : phi.taylor) {
      x *= rn;
      rn *= r;
    }
    CHECK(std::abs(sarason_coefficients(phi, 0.0) - norm_squared(phi)) < 1e-12 * norm_squared(phi));
    for (int k = 0; k < 10; ++k) {
      const cplx z = std::polar(0.95 * rng.next_uniform(), 2 * kPi * rng.next_uniform());
      const std::vector<cplx> zz{z};
      const auto direct = sarason_function_direct(spec, mu, r, zz);
      CHECK(std::abs(sarason_coefficients(phi, z) - direct.value) < 1e-9 * std::max(1.0, std::abs(direct.value)));
    }
  }
  const auto spec = KernelSpec::from_a(1, 1.0);
  const auto unit = coefficient_function(spec, {1.0});
  CHECK(sarason_grid_max(unit) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sup_norm_grid(coefficient_function(spec, {1.0, 0.5})) == doctest::Approx(1.5).epsilon(1e-15));
}
