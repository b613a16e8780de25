#include <algorithm>
#include <cmath>

#include "cap_geometry.hpp"
#include "capball/energy.hpp"
#include "capball/errors.hpp"
#include "capball/numerics.hpp"

namespace capball {

using numerics::kPi;

namespace {

constexpr double kTwoPi = 2.0 * kPi;
constexpr int kArcOrder = 12;
constexpr int kRingOrder = 4;
constexpr int kRingDepth = 7;

double kernel_of_gap(double p, double gap) {
  return p == 0.0 ? 1.0 - std::log(gap) : std::pow(gap, -p);
}

// chord / arc = sin(v/2) / (v/2)
double sinc_half(double v) { return v == 0.0 ? 1.0 : std::sin(0.5 * v) / (0.5 * v); }

double wrap(double x) {
  x = std::fmod(x, kTwoPi);
  if (x <= -kPi) x += kTwoPi;
  if (x > kPi) x -= kTwoPi;
  return x;
}

}  // namespace

CellPotential::CellPotential(const CellComplex& cx, double exponent) : cx_(&cx), p_(exponent) {
  if (!(exponent >= 0.0) || !std::isfinite(exponent)) {
    throw DomainError("cell potential exponent must be finite and nonnegative");
  }
  if (cx.layout == CellLayout::Arcs) {
    if (exponent >= 1.0) throw DomainError("arc cell potentials need exponent < 1");
    f_pi_ = arc_primitive(kPi);
  }
  if (cx.layout == CellLayout::Rings && exponent >= 1.5) {
    throw DomainError("ring cell potentials need exponent < 3/2");
  }
}

// int_0^x k(2 sin(v/2)) dv for 0 <= x <= pi: the |v| model in closed form plus
// a correction that vanishes like v^{2-p} at 0
double CellPotential::arc_primitive(double x) const {
  if (x <= 0.0) return 0.0;
  if (p_ == 0.0) {
    const double main = 2.0 * x - x * std::log(x);
    auto corr = [](double v) { return -std::log(sinc_half(v)); };
    return main + numerics::integrate_gauss(corr, 0.0, x, kArcOrder, 1);
  }
  const double main = std::pow(x, 1.0 - p_) / (1.0 - p_);
  auto corr = [this](double u) {
    return std::pow(u, -p_) * std::expm1(-p_ * std::log(sinc_half(u)));
  };
  return main + numerics::integrate_singular_offset(corr, x, kArcOrder, 1e-2);
}

// periodic, odd continuation of arc_primitive
double CellPotential::arc_antiderivative(double x) const {
  if (x < 0.0) return -arc_antiderivative(-x);
  const double n = std::floor(x / kTwoPi);
  const double r = x - n * kTwoPi;
  const double base = r <= kPi ? arc_primitive(r) : 2.0 * f_pi_ - arc_primitive(kTwoPi - r);
  return n * 2.0 * f_pi_ + base;
}

double CellPotential::arc_average(std::size_t cell, double phi) const {
  const Cell& c = cx_->cells[cell];
  const double h = c.arc_length;
  const double delta = wrap(std::arg(c.center[0]) - phi);
  const double lo = delta - 0.5 * h;
  const double hi = delta + 0.5 * h;
  double dist = 1e300;
  for (double s : {-kTwoPi, 0.0, kTwoPi}) {
    if (s >= lo && s <= hi) {
      dist = 0.0;
    } else {
      dist = std::min(dist, std::min(std::abs(s - lo), std::abs(s - hi)));
    }
  }
  if (dist >= 0.5 * h) {
    auto k = [this](double v) { return kernel_of_gap(p_, std::abs(2.0 * std::sin(0.5 * v))); };
    return numerics::integrate_gauss(k, lo, hi, kArcOrder, 1) / h;
  }
  return (arc_antiderivative(hi) - arc_antiderivative(lo)) / h;
}

double CellPotential::at_ring(std::size_t cell, cplx x) const {
  if (cx_->layout != CellLayout::Rings) throw DomainError("ring evaluation needs ring cells");
  const detail::CapGeometry geo(cx_->cap_delta);
  const RingKernel ring(p_);
  const auto& patch = cx_->patches[cell];
  const auto& g = numerics::gauss_legendre(kRingOrder);
  const double ox = std::max(0.0, 1.0 - std::norm(x));

  // integral of the ring kernel over [ta, tb] x [ua, ub] with area element
  // rho_max^2 / 2 du dtheta, refined toward x
  auto integral = [&](auto&& self, double ta, double tb, double ua, double ub, int depth) -> double {
    const cplx mid = geo.point(0.5 * (ta + tb), 0.5 * (ua + ub));
    double radius = 0.0;
    for (double t : {ta, 0.5 * (ta + tb), tb}) {
      for (double u : {ua, 0.5 * (ua + ub), ub}) radius = std::max(radius, std::abs(geo.point(t, u) - mid));
    }
    if (depth < kRingDepth && std::abs(x - mid) <= 2.0 * radius) {
      const double tm = 0.5 * (ta + tb);
      const double um = 0.5 * (ua + ub);
      return self(self, ta, tm, ua, um, depth + 1) + self(self, tm, tb, ua, um, depth + 1) +
             self(self, ta, tm, um, ub, depth + 1) + self(self, tm, tb, um, ub, depth + 1);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double th = ta + 0.5 * (g.nodes[i] + 1.0) * (tb - ta);
      const double rm = geo.rho_max(th);
      for (std::size_t j = 0; j < g.nodes.size(); ++j) {
        const double u = ua + 0.5 * (g.nodes[j] + 1.0) * (ub - ua);
        const cplx y = geo.point(th, u);
        const double gap2 = std::norm(x - y);
        if (!(gap2 > 0.0)) continue;
        const double b = std::sqrt(ox * std::max(0.0, 1.0 - std::norm(y)));
        s += g.weights[i] * g.weights[j] * 0.5 * rm * rm * ring.from_parts(b, gap2);
      }
    }
    return 0.25 * (tb - ta) * (ub - ua) * s;
  };
  const double area = 0.5 * (patch[3] - patch[2]) * geo.rho_max2_integral(patch[0], patch[1]);
  return integral(integral, patch[0], patch[1], patch[2], patch[3], 0) / area;
}

double CellPotential::operator()(std::size_t cell, const BoundaryPoint& z) const {
  if (z.dim() != cx_->d) throw DomainError("point dimension does not match the complex");
  switch (cx_->layout) {
    case CellLayout::Arcs:
      return arc_average(cell, std::arg(z[0]));
    case CellLayout::Rings:
      return at_ring(cell, hermitian_inner(z, *cx_->axis));
    case CellLayout::Clusters: {
      const auto& pts = cx_->members[cell];
      const auto& wts = cx_->member_weights[cell];
      double num = 0.0;
      double den = 0.0;
      for (std::size_t m = 0; m < pts.size(); ++m) {
        const double gap = std::abs(1.0 - hermitian_inner(z, pts[m]));
        if (!(gap > 1e-14)) continue;
        num += wts[m] * kernel_of_gap(p_, gap);
        den += wts[m];
      }
      if (den == 0.0) return kernel_of_gap(p_, std::pow(cx_->cells[cell].mass, 1.0 / cx_->d));
      return num / den;
    }
  }
  return 0.0;
}

}  // namespace capball
