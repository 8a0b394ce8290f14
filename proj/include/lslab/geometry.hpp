#pragma once

#include <array>
#include <optional>

#include "lslab/expr.hpp"

namespace lslab {

// Polar graph r = radius(theta). Derivatives are symbolic so the metric terms
// of the boundary-fitted map stay exact.
class BoundaryCurve {
 public:
  BoundaryCurve() = default;
  explicit BoundaryCurve(ScalarExpr radius, int samples = 4096);

  double radius(double theta) const;
  double d_radius(double theta) const;
  double d2_radius(double theta) const;
  Point point(double theta) const;

  const ScalarExpr& expr() const { return radius_; }
  int samples() const { return samples_; }

 private:
  ScalarExpr radius_;
  ScalarExpr d1_;
  ScalarExpr d2_;
  int samples_ = 4096;
};

// Column-major: col 0 = d(x,y)/dtheta, col 1 = d(x,y)/ds.
struct Jacobian {
  double xt = 0, yt = 0, xs = 0, ys = 0;
  double det() const { return xt * ys - xs * yt; }
};

struct MapResult {
  Point point;
  Jacobian jacobian;
};

struct RefCoord {
  double theta = 0.0;  // in [0, 2pi)
  double s = 0.0;
};

// First and second derivatives of the reference coordinates (theta, s) with
// respect to (x, y) at a physical point.
struct InverseMetric {
  double tx = 0, ty = 0, txx = 0, txy = 0, tyy = 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
};

class DomainSpec {
 public:
  DomainSpec() = default;
  DomainSpec(std::optional<BoundaryCurve> interior, BoundaryCurve exterior)
      : interior_(std::move(interior)), exterior_(std::move(exterior)) {}

  bool is_annulus() const { return interior_.has_value(); }
  const std::optional<BoundaryCurve>& interior() const { return interior_; }
  const BoundaryCurve& exterior() const { return exterior_; }

  double inner_radius(double theta) const { return interior_ ? interior_->radius(theta) : 0.0; }
  double outer_radius(double theta) const { return exterior_.radius(theta); }
  double gap(double theta) const { return outer_radius(theta) - inner_radius(theta); }

  Point map(double theta, double s) const;

  // Throws SingularMap when |det J| < 1e-14 (disk center).
  MapResult map_reference(double theta, double s) const;

  // Explicit inverse: theta = atan2(y, x), s from the radial blend. Throws
  // OutsideDomain if s falls outside [0, 1] by more than slack.
  RefCoord inverse(Point p, double slack = 0.0) const;

  // Throws SingularMap at the origin of a disk-like domain.
  InverseMetric inverse_metric(Point p) const;

  double max_radius() const;
  double diameter() const { return 2.0 * max_radius(); }

 private:
  std::optional<BoundaryCurve> interior_;
  BoundaryCurve exterior_;
};

double wrap_angle(double theta);  // into [0, 2pi)

}  // namespace lslab
