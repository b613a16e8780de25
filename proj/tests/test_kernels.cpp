#include <cmath>

#include "capball/errors.hpp"
#include "capball/kernels.hpp"
#include "capball/numerics.hpp"
#include "doctest.h"

using namespace capball;
using numerics::kPi;

namespace {
BoundaryPoint random_point(numerics::CounterRng& rng, int d) {
  std::vector<cplx> c(d);
  for (auto& x : c) x = cplx(rng.next_normal(), rng.next_normal());
  return BoundaryPoint(c);
}
std::vector<cplx> random_ball_point(numerics::CounterRng& rng, int d) {
  auto p = random_point(rng, d).coords();
  const double r = std::pow(rng.next_uniform(), 1.0 / (2 * d));
  for (auto& x : p) x *= r;
  return p;
}
}  // namespace

TEST_CASE("riesz kernel examples") {
  auto one = BoundaryPoint::on_circle(0), minus = BoundaryPoint::on_circle(kPi);
  CHECK(riesz_kernel(KernelSpec::from_s(1, 0.5), one, minus) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(riesz_kernel(KernelSpec::from_s(1, 1.0), one, minus) ==
        doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-15));
  CHECK(std::isinf(riesz_kernel(KernelSpec::from_s(1, 0.5), one, one)));
}

TEST_CASE("da kernel examples and alias") {
  auto one = BoundaryPoint::on_circle(0), i = BoundaryPoint::on_circle(0.5 * kPi),
       minus = BoundaryPoint::on_circle(kPi);
  CHECK(da_kernel_abs(KernelSpec::from_a(1, 0.5), one, i) ==
        doctest::Approx(std::pow(2.0, -0.25)).epsilon(1e-15));
  CHECK(da_kernel_abs(KernelSpec::from_a(1, 0.0), one, minus) ==
        doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-15));
  numerics::CounterRng rng(3);
  for (int d = 1; d <= 3; ++d) {
    for (double a : {0.0, 0.25, 0.5, 0.9}) {
      auto spec = KernelSpec::from_a(d, a);
      for (int k = 0; k < 100; ++k) {
        auto z = random_point(rng, d), w = random_point(rng, d);
        CHECK(std::abs(da_kernel_abs(spec, z, w) - riesz_kernel(d, 2.0 * spec.s, z, w)) <= 1e-14);
        // |K_a| on the sphere
        CHECK(da_kernel_abs(spec, z, w) ==
              doctest::Approx(a == 0.0 ? 1.0 - std::log(std::abs(1.0 - hermitian_inner(z, w)))
                                       : std::abs(holo_kernel(spec, z.coords(), w.coords())))
                  .epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("kernel spec") {
  auto s = KernelSpec::from_s(2, 0.75);
  CHECK(s.a == 0.5);
  CHECK(!s.log_branch());
  CHECK(KernelSpec::from_s(2, 1.0).log_branch());
  CHECK_NOTHROW(s.require_capacity_range());
  CHECK_THROWS_AS(KernelSpec::from_a(1, 1.0).require_capacity_range(), DomainError);
  CHECK_THROWS_AS(KernelSpec::from_s(2, 0.5).require_capacity_range(), DomainError);
}

TEST_CASE("holomorphic kernel") {
  std::vector<cplx> zero{0.0}, half{0.5}, one{1.0};
  CHECK(holo_kernel(KernelSpec::from_a(1, 1.0), zero, one) == cplx(1.0, 0.0));
  CHECK(std::abs(holo_kernel(KernelSpec::from_a(1, 1.0), half, one) - 2.0) < 1e-15);
  CHECK(holo_kernel(KernelSpec::from_a(1, 0.0), zero, one) == cplx(1.0, 0.0));
  CHECK_THROWS_AS(holo_kernel(KernelSpec::from_a(1, 0.5), one, one), DomainError);
  // positivity of the real part and |K| <= C Re K on random ball pairs
  numerics::CounterRng rng(5);
  for (double a : {0.0, 0.5, 0.99}) {
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const int d = 1 + k % 3;
      auto z = random_ball_point(rng, d), w = random_ball_point(rng, d);
      cplx K = holo_kernel(KernelSpec::from_a(d, a), z, w);
      CHECK(K.real() > 0.0);
      worst = std::max(worst, std::abs(K) / K.real());
    }
    // a < 1: arg K_a <= a pi/2, so |K| / Re K <= 1 / cos(a pi / 2); log: arg <= pi/2 / 1
    const double bound = a == 0.0 ? std::sqrt(1.0 + kPi * kPi / 4.0) : 1.0 / std::cos(a * kPi / 2);
    CHECK(worst <= bound);
  }
}

TEST_CASE("series coefficients") {
  auto one = series_coefficients_da(1.0, 20);
  for (double v : one.values) CHECK(v == 1.0);
  auto half = series_coefficients_da(0.5, 4);
  CHECK(half[0] == 1.0);
  CHECK(half[1] == 0.5);
  CHECK(half[2] == 0.375);
  auto lg = series_coefficients_da(0.0, 4);
  CHECK(lg[0] == 1.0);
  CHECK(lg[1] == 1.0);
  CHECK(lg[2] == 0.5);
  CHECK(lg[3] == doctest::Approx(1.0 / 3.0).epsilon(1e-16));
  CHECK_THROWS_AS(series_coefficients_da(-0.1, 4), DomainError);
  CHECK_THROWS_AS(series_coefficients_da(0.5, 0), DomainError);

  auto h1 = series_coefficients_hs(1, 0.0, 10);
  for (double v : h1.values) CHECK(v == 1.0);
  auto h2 = series_coefficients_hs(2, 0.0, 10);
  for (int n = 0; n <= 10; ++n) CHECK(h2[n] == doctest::Approx(n + 1.0).epsilon(1e-15));
  auto dir = series_coefficients_hs(1, 0.5, 10);
  for (int n = 0; n <= 10; ++n) CHECK(dir[n] == doctest::Approx(1.0 / (n + 1.0)).epsilon(1e-15));
}

TEST_CASE("D_a and H_s weights are comparable") {
  for (int d = 1; d <= 3; ++d) {
    for (double a : {0.0, 0.25, 0.5, 0.75}) {
      auto da = series_coefficients_da(a, kDefaultTruncation);
      auto hs = series_coefficients_hs(d, 0.5 * (d - a), kDefaultTruncation);
      double lo = 1e300, hi = 0.0;
      for (int n = 0; n <= kDefaultTruncation; ++n) {
        lo = std::min(lo, da[n] / hs[n]);
        hi = std::max(hi, da[n] / hs[n]);
      }
      CHECK(lo > 0.0);
      CHECK(hi / lo < 20.0);
    }
  }
}

TEST_CASE("pick coefficients") {
  auto b1 = pick_coefficients(series_coefficients_da(1.0, 10), 10);
  CHECK(b1[0] == 1.0);
  for (int n = 1; n < 10; ++n) CHECK(b1[n] == 0.0);
  SeriesCoefficients lin{{1, 2, 3, 4, 5}, "test", 2.0};
  auto b2 = pick_coefficients(lin, 4);
  CHECK(b2[0] == 2.0);
  CHECK(b2[1] == -1.0);
  CHECK(pick_coefficients(series_coefficients_da(2.0, 4), 4)[1] == doctest::Approx(-1.0));
  auto mod = pick_coefficients(series_coefficients_modified_log(200), 200);
  for (double b : mod) CHECK(b >= 0.0);
  CHECK_THROWS_AS(pick_coefficients(lin, 5), DomainError);
}

TEST_CASE("pick round trip") {
  numerics::CounterRng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = rng.next_uniform();
    auto c = series_coefficients_da(a, 64);
    auto back = coefficients_from_pick(pick_coefficients(c, 64));
    for (int n = 0; n <= 64; ++n) CHECK(back[n] == doctest::Approx(c[n]).epsilon(1e-12));
  }
}

TEST_CASE("regularity report") {
  for (double a : {0.25, 0.5, 1.0}) {
    auto r = regularity(series_coefficients_da(a, 400));
    CHECK(r.ratio_window_ok);
    CHECK(r.first_within_1e2 >= 0);
    CHECK(r.first_within_1e2 <= 100);
  }
  auto m = regularity(series_coefficients_modified_log(400));
  CHECK(m.first_within_1e2 <= 100);
}

TEST_CASE("iterated kernel on the circle") {
  auto spec = KernelSpec::from_s(1, 0.5);
  auto r1024 = make_quadrature(1, 1024), r4096 = make_quadrature(1, 4096),
       r2048 = make_quadrature(1, 2048);
  auto one = BoundaryPoint::on_circle(0), minus = BoundaryPoint::on_circle(kPi);
  const double g = iterated_kernel(spec, one, minus, r2048);
  CHECK(g > 0.0);
  CHECK(std::isfinite(g));
  // antipode: G = (1/2pi) int_0^{2pi} |2 sin t|^{-1/2} dt
  //             = Gamma(1/4) sqrt(pi) / (sqrt(2) pi Gamma(3/4))
  const double oracle =
      std::tgamma(0.25) * std::sqrt(kPi) / (std::sqrt(2.0) * kPi * std::tgamma(0.75));
  CHECK(g == doctest::Approx(oracle).epsilon(1e-10));
  numerics::CounterRng rng(17);
  for (int k = 0; k < 20; ++k) {
    auto z = BoundaryPoint::on_circle(2 * kPi * rng.next_uniform());
    auto w = BoundaryPoint::on_circle(2 * kPi * rng.next_uniform());
    if (koranyi_distance(z, w) < 0.1) continue;
    const double a = iterated_kernel(spec, z, w, r1024), b = iterated_kernel(spec, z, w, r4096);
    CHECK(std::abs(a - b) <= 1e-6 * std::abs(b));
    CHECK(std::abs(iterated_kernel(spec, z, w, r1024) - iterated_kernel(spec, w, z, r1024)) <= 1e-12);
  }
  CHECK_THROWS_AS(iterated_kernel(spec, one, one, r1024), DomainError);
}

TEST_CASE("iterated kernel on S^3") {
  auto rule = make_quadrature(2, 16);
  auto e1 = BoundaryPoint::basis(2, 0);
  for (double s : {0.75, 1.0}) {
    auto spec = KernelSpec::from_s(2, s);
    numerics::CounterRng rng(21);
    for (int k = 0; k < 4; ++k) {
      std::vector<cplx> c{cplx(rng.next_normal(), rng.next_normal()),
                          cplx(rng.next_normal(), rng.next_normal())};
      BoundaryPoint w(c);
      const double g = iterated_kernel(spec, e1, w, rule);
      CHECK(g > 0.0);
      CHECK(std::abs(g - iterated_kernel(spec, w, e1, rule)) <= 1e-12 * g);
      // unitary invariance: G depends only on <z,w>
      const double direct = iterated_kernel_of_inner(2, s, hermitian_inner(e1, w), 24);
      CHECK(g == doctest::Approx(direct).epsilon(1e-4));
    }
  }
  CHECK_THROWS_AS(iterated_kernel_of_inner(3, 1.0, cplx(0.5, 0), 8), UnsupportedDimension);
}

TEST_CASE("iterated kernel on S^3 against frozen nested-quadrature values") {
  // reference: adaptive nested quadrature of the disk reduction in polar
  // coordinates about x = 1, with an independent 2F1 implementation
  struct Case {
    double s;
    cplx t;
    double value;
  };
  const Case cases[] = {{0.75, {0.3, 0.2}, 2.710552570113417},
                        {1.0, {0.3, 0.2}, 1.7868213278296874},
                        {0.75, {-0.5, 0.5}, 1.5806253065645623},
                        {1.0, {-0.5, 0.5}, 1.3013144386073137},
                        {1.0, {0.99, 0.0}, 5.544300686398398}};
  for (const auto& c : cases) {
    CHECK(iterated_kernel_of_inner(2, c.s, c.t, 32) == doctest::Approx(c.value).epsilon(1e-8));
    CHECK(iterated_kernel_of_inner(2, c.s, std::conj(c.t), 32) ==
          doctest::Approx(c.value).epsilon(1e-8));
  }
}
