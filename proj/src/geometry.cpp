#include "lslab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lslab/error.hpp"

namespace lslab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

BoundaryCurve::BoundaryCurve(ScalarExpr radius, int samples)
    : radius_(std::move(radius)), samples_(samples) {
  // Radii that reference x, y or r are rejected by validation; leave their
  // derivatives at zero so construction itself never throws.
  if (radius_.uses(Variable::X) || radius_.uses(Variable::Y) || radius_.uses(Variable::R)) return;
  d1_ = radius_.derivative_theta();
  d2_ = d1_.derivative_theta();
}

double BoundaryCurve::radius(double theta) const { return radius_.evaluate(Bindings::at_angle(theta)); }
double BoundaryCurve::d_radius(double theta) const { return d1_.evaluate(Bindings::at_angle(theta)); }
double BoundaryCurve::d2_radius(double theta) const { return d2_.evaluate(Bindings::at_angle(theta)); }

Point BoundaryCurve::point(double theta) const {
  const double r = radius(theta);
  return {r * std::cos(theta), r * std::sin(theta)};
}

Point DomainSpec::map(double theta, double s) const {
  const double rho = (1.0 - s) * inner_radius(theta) + s * outer_radius(theta);
  return {rho * std::cos(theta), rho * std::sin(theta)};
}

MapResult DomainSpec::map_reference(double theta, double s) const {
  const double ri = inner_radius(theta);
  const double re = outer_radius(theta);
  const double dri = interior_ ? interior_->d_radius(theta) : 0.0;
  const double dre = exterior_.d_radius(theta);
  const double rho = (1.0 - s) * ri + s * re;
  const double drho = (1.0 - s) * dri + s * dre;
  const double c = std::cos(theta), sn = std::sin(theta);
  MapResult out;
  out.point = {rho * c, rho * sn};
  out.jacobian.xt = drho * c - rho * sn;
  out.jacobian.yt = drho * sn + rho * c;
  out.jacobian.xs = (re - ri) * c;
  out.jacobian.ys = (re - ri) * sn;
  if (std::fabs(out.jacobian.det()) < 1e-14)
    throw SingularMap("reference map is singular at theta=" + std::to_string(theta) +
                      ", s=" + std::to_string(s));
  return out;
}

RefCoord DomainSpec::inverse(Point p, double slack) const {
  const double theta = wrap_angle(std::atan2(p.y, p.x));
  const double r = std::hypot(p.x, p.y);
  const double ri = inner_radius(theta);
  const double s = (r - ri) / (outer_radius(theta) - ri);
  if (!(s >= -slack && s <= 1.0 + slack))
    throw OutsideDomain("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                        ") lies outside the domain (s=" + std::to_string(s) + ")");
  return {theta, std::clamp(s, 0.0, 1.0)};
}

InverseMetric DomainSpec::inverse_metric(Point p) const {
  const double x = p.x, y = p.y;
  const double r2 = x * x + y * y;
  if (r2 < 1e-28) throw SingularMap("inverse metric undefined at the polar origin");
  const double r = std::sqrt(r2);
  const double r3 = r2 * r, r4 = r2 * r2;
  const double theta = std::atan2(y, x);

  InverseMetric m;
  m.tx = -y / r2;
  m.ty = x / r2;
  m.txx = 2.0 * x * y / r4;
  m.tyy = -2.0 * x * y / r4;
  m.txy = (y * y - x * x) / r4;
  const double rx = x / r, ry = y / r;
  const double rxx = y * y / r3, ryy = x * x / r3, rxy = -x * y / r3;

  // s = (r - R_I(theta)) / D(theta), D = R_E - R_I.
  const double ri = inner_radius(theta);
  const double d = outer_radius(theta) - ri;
  const double ri1 = interior_ ? interior_->d_radius(theta) : 0.0;
  const double ri2 = interior_ ? interior_->d2_radius(theta) : 0.0;
  const double d1 = exterior_.d_radius(theta) - ri1;
  const double d2 = exterior_.d2_radius(theta) - ri2;
  const double s = (r - ri) / d;

  const double S_r = 1.0 / d;
  const double S_t = -(ri1 + s * d1) / d;
  const double S_rt = -d1 / (d * d);
  const double S_tt = -(ri2 + 2.0 * S_t * d1 + s * d2) / d;

  m.sx = S_r * rx + S_t * m.tx;
  m.sy = S_r * ry + S_t * m.ty;
  m.sxx = 2.0 * S_rt * rx * m.tx + S_tt * m.tx * m.tx + S_r * rxx + S_t * m.txx;
  m.syy = 2.0 * S_rt * ry * m.ty + S_tt * m.ty * m.ty + S_r * ryy + S_t * m.tyy;
  m.sxy = S_rt * (rx * m.ty + ry * m.tx) + S_tt * m.tx * m.ty + S_r * rxy + S_t * m.txy;
  return m;
}

double DomainSpec::max_radius() const {
  const int n = exterior_.samples();
  double best = 0.0;
  for (int k = 0; k < n; ++k) best = std::max(best, outer_radius(kTwoPi * k / n));
  return best;
}

}  // namespace lslab
