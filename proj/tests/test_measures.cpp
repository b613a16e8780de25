#include <algorithm>
#include <cmath>

#include "capball/errors.hpp"
#include "capball/measures.hpp"
#include "capball/numerics.hpp"
#include "doctest.h"

using namespace capball;
using numerics::kPi;

namespace {

BoundaryPoint random_point(numerics::CounterRng& rng, int d) {
  std::vector<cplx> c(d);
  for (auto& x : c) x = {rng.next_normal(), rng.next_normal()};
  return BoundaryPoint(c);
}

AtomicMeasure random_measure(numerics::CounterRng& rng, int d, int n) {
  AtomicMeasure mu;
  for (int k = 0; k < n; ++k) mu.atoms.push_back({random_point(rng, d), 0.1 + rng.next_uniform()});
  mu.validate();
  return mu;
}

std::vector<cplx> interior(numerics::CounterRng& rng, int d, double rmax) {
  auto p = random_point(rng, d).coords();
  const double r = rmax * rng.next_uniform();
  for (auto& x : p) x *= r;
  return p;
}

}  // namespace

TEST_CASE("atomic measure validation and JSON") {
  AtomicMeasure bad;
  bad.atoms.push_back({BoundaryPoint::on_circle(0.3), -1.0});
  CHECK_THROWS_AS(bad.validate(), ConstructionError);
  AtomicMeasure dup;
  dup.atoms.push_back({BoundaryPoint::on_circle(0.3), 1.0});
  dup.atoms.push_back({BoundaryPoint::on_circle(0.3), 2.0});
  CHECK_THROWS_AS(dup.validate(), ConstructionError);
  AtomicMeasure mixed;
  mixed.atoms.push_back({BoundaryPoint::on_circle(0.3), 1.0});
  mixed.atoms.push_back({BoundaryPoint::basis(2, 0), 1.0});
  CHECK_THROWS_AS(mixed.validate(), ConstructionError);

  numerics::CounterRng rng(7);
  auto mu = random_measure(rng, 2, 5);
  mu.support = SetSpec::cap(BoundaryPoint::basis(2, 0), 0.5);
  const auto back = measure_from_json(nlohmann::json::parse(to_json(mu).dump()));
  REQUIRE(back.atoms.size() == mu.atoms.size());
  for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
    CHECK(back.atoms[i].point == mu.atoms[i].point);
    CHECK(back.atoms[i].weight == mu.atoms[i].weight);
  }
  CHECK(back.support.has_value());
  CHECK_THROWS_AS(measure_from_json(nlohmann::json::parse(R"({"atoms": [{"weight": 1}]})")),
                  ConstructionError);
}

TEST_CASE("riesz and D_a potentials") {
  const auto w = BoundaryPoint::on_circle(0.4);
  const auto z = BoundaryPoint::on_circle(2.0);
  const auto spec = KernelSpec::from_s(1, 0.7);
  CHECK(riesz_potential(spec, AtomicMeasure::point_mass(w), z) == riesz_kernel(spec, z, w));
  CHECK(std::isinf(riesz_potential(spec, AtomicMeasure::point_mass(w), w)));

  // log branch against the uniform measure: sum over shifted roots is exact
  const int N = 2048;
  const auto sigma = AtomicMeasure::uniform_circle(N);
  const auto log_spec = KernelSpec::from_s(1, 1.0);
  const auto mid = BoundaryPoint::on_circle(kPi / N);
  CHECK(riesz_potential(log_spec, sigma, mid) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(riesz_potential(log_spec, sigma, mid) ==
        doctest::Approx(1.0 - std::log(2.0) / N).epsilon(1e-12));
  CHECK(riesz_potential(spec, 2.0 * sigma, mid) ==
        doctest::Approx(2.0 * riesz_potential(spec, sigma, mid)).epsilon(1e-14));

  numerics::CounterRng rng(11);
  for (int t = 0; t < 100; ++t) {
    const int d = 1 + t % 3;
    const double s = 0.5 * (d - 1) + 0.5 * rng.next_uniform() + 1e-3;
    const auto ks = KernelSpec::from_s(d, s);
    const auto mu = random_measure(rng, d, 3);
    const auto x = random_point(rng, d);
    double direct = 0.0;
    for (const auto& at : mu.atoms) direct += at.weight * riesz_kernel(d, 2 * s, x, at.point);
    CHECK(da_potential(ks, mu, x) == doctest::Approx(direct).epsilon(1e-14));
  }

  const auto a_spec = KernelSpec::from_a(2, 0.5);
  CHECK(da_potential(a_spec, AtomicMeasure::point_mass(BoundaryPoint::basis(2, 1)),
                     BoundaryPoint::basis(2, 0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(da_potential(a_spec, AtomicMeasure{}, BoundaryPoint::basis(2, 0)) == 0.0);
  CHECK_THROWS_AS(da_potential(a_spec, sigma, BoundaryPoint::basis(2, 0)), DomainError);
}

TEST_CASE("potential linearity and positivity") {
  numerics::CounterRng rng(21);
  for (int t = 0; t < 50; ++t) {
    const int d = 1 + t % 2;
    const auto spec = KernelSpec::from_a(d, rng.next_uniform());
    const auto mu = random_measure(rng, d, 4);
    const auto nu = random_measure(rng, d, 3);
    const auto x = random_point(rng, d);
    const double sum = riesz_potential(spec, mu + nu, x);
    CHECK(sum == doctest::Approx(riesz_potential(spec, mu, x) + riesz_potential(spec, nu, x))
                     .epsilon(1e-13));
    CHECK(sum >= 0.0);
    const auto z = interior(rng, d, 0.999);
    const cplx f = holo_potential(spec, mu + nu, z);
    const cplx g = holo_potential(spec, mu, z) + holo_potential(spec, nu, z);
    CHECK(std::abs(f - g) <= 1e-12 * std::abs(f));
    CHECK(f.real() > 0.0);
  }
}

TEST_CASE("holomorphic potential and dilation") {
  const auto spec1 = KernelSpec::from_a(1, 1.0);
  const auto delta1 = AtomicMeasure::point_mass(BoundaryPoint::on_circle(0.0));
  for (double r : {0.0, 0.3, 0.9, 0.999}) {
    const std::vector<cplx> z{r};
    CHECK(holo_potential(spec1, delta1, z).real() == doctest::Approx(1.0 / (1.0 - r)).epsilon(1e-13));
  }
  const std::vector<cplx> one{1.0};
  CHECK_THROWS_AS(holo_potential(spec1, delta1, one), DomainError);

  numerics::CounterRng rng(5);
  const auto spec = KernelSpec::from_a(2, 0.3);
  const auto mu = random_measure(rng, 2, 6);
  const std::vector<cplx> zero{0.0, 0.0};
  CHECK(std::abs(holo_potential(spec, mu, zero) - mu.total_mass()) < 1e-14);

  const auto z = interior(rng, 2, 1.0);
  const auto f = dilate(spec, mu, 0.0);
  CHECK(std::abs(f(z) - mu.total_mass()) < 1e-14);
  const auto g = dilate(spec, mu, 0.8).dilate(0.7);
  CHECK(std::abs(g(z) - dilate(spec, mu, 0.56)(z)) < 1e-12 * std::abs(g(z)));
  CHECK_THROWS_AS(dilate(spec, mu, 1.0), DomainError);

  double prev = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double r = 0.05 * k;
    const double v = dilate(spec1, delta1, r)(one).real();
    CHECK(v == doctest::Approx(1.0 / (1.0 - r)).epsilon(1e-13));
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("Sarason function") {
  const auto spec = KernelSpec::from_a(1, 0.5);
  const auto unit = AtomicMeasure::point_mass(BoundaryPoint::on_circle(1.0));
  numerics::CounterRng rng(3);
  for (int t = 0; t < 10; ++t) {
    const auto z = interior(rng, 1, 0.99);
    const auto v = sarason_function(spec, unit, 0.0, z);
    CHECK(std::abs(v.value - 1.0) < 1e-14);
  }

  for (double a : {0.0, 0.4, 1.0}) {
    const auto sp = KernelSpec::from_a(1, a);
    const auto mu = random_measure(rng, 1, 5);
    const std::vector<cplx> zero{0.0};
    const auto v0 = sarason_function(sp, mu, 0.7, zero, 256);
    CHECK(v0.value.imag() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(v0.value.real() == doctest::Approx(v0.norm_squared).epsilon(1e-12));
    for (int t = 0; t < 10; ++t) {
      const auto z = interior(rng, 1, 0.95);
      const auto c = sarason_function(sp, mu, 0.7, z, 256);
      const auto d = sarason_function_direct(sp, mu, 0.7, z);
      CHECK(c.path == "coefficients");
      CHECK(std::abs(c.value - d.value) <= 1e-10 * std::max(1.0, std::abs(d.value)));
      CHECK(c.norm_squared == doctest::Approx(d.norm_squared).epsilon(1e-11));
    }
  }

  // Hardy weights: Re V is the Poisson integral of |f|^2, bounded by sup |f|^2
  const auto hardy = KernelSpec::from_a(1, 1.0);
  const double r = 0.9;
  const double scale = std::sqrt(1.0 - r * r);  // ||f_r||^2 = 1/(1 - r^2)
  const auto mu = scale * AtomicMeasure::point_mass(BoundaryPoint::on_circle(0.0));
  const double sup2 = scale * scale / ((1.0 - r) * (1.0 - r));
  for (double rad : {0.5, 0.9, 0.99}) {
    for (int k = 0; k < 64; ++k) {
      const std::vector<cplx> z{std::polar(rad, 2 * kPi * k / 64)};
      const auto v = sarason_function(hardy, mu, r, z, 2048);
      CHECK(v.norm_squared == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(v.value.real() <= 2.0 * sup2);
    }
  }

  const std::vector<cplx> z{0.5};
  CHECK_THROWS_AS(sarason_function(spec, unit, 0.99, z, 16), ToleranceNotMet);
  CHECK_THROWS_AS(sarason_function(KernelSpec::from_a(1, 1.5), unit, 0.5, z), DomainError);

  const auto spec2 = KernelSpec::from_a(2, 0.5);
  const auto mu2 = random_measure(rng, 2, 4);
  const std::vector<cplx> zero2{0.0, 0.0};
  const auto v2 = sarason_function(spec2, mu2, 0.8, zero2);
  CHECK(v2.path == "double-sum");
  CHECK(std::abs(v2.value - v2.norm_squared) < 1e-12 * v2.norm_squared);
}

TEST_CASE("radial probes") {
  const auto spec = KernelSpec::from_a(1, 0.5);
  const auto zeta = BoundaryPoint::on_circle(0.3);
  const auto radii = default_probe_radii();
  CHECK(radii.front() == 0.0);
  CHECK(radii.back() == kDefaultProbeStop);
  const auto vals = radial_probe(spec, AtomicMeasure::point_mass(zeta), zeta, radii);
  CHECK(std::abs(vals.front() - 1.0) < 1e-15);
  for (std::size_t i = 1; i < vals.size(); ++i) {
    CHECK(std::abs(vals[i]) > std::abs(vals[i - 1]));
    CHECK(std::abs(vals[i]) == doctest::Approx(std::pow(1.0 - radii[i], -0.5)).epsilon(1e-10));
  }

  // measure on the far arc: bounded with positive real part
  AtomicMeasure far;
  for (int k = 0; k < 32; ++k) far.atoms.push_back({BoundaryPoint::on_circle(0.3 + kPi - 0.5 + k / 31.0), 1.0 / 32});
  const auto fv = radial_probe(spec, far, zeta, radii);
  for (const auto& v : fv) {
    CHECK(v.real() > 0.0);
    CHECK(std::abs(v) < 2.0);
  }
  CHECK(std::abs(fv.front() - far.total_mass()) < 1e-14);

  const std::vector<double> bad{0.0, 0.5, 0.5};
  CHECK_THROWS_AS(radial_probe(spec, far, zeta, bad), DomainError);
  const std::vector<double> out{0.0, 1.0};
  CHECK_THROWS_AS(radial_probe(spec, far, zeta, out), DomainError);

  const auto csv = probe_csv(radii, vals);
  CHECK(csv.rfind("r,re,im,abs\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(radii.size()) + 1);
}
