#include "lslab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace lslab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kCurveSamples = 4096;
constexpr int kInteriorSamples = 256;

bool is_literal_zero(const ScalarExpr& e) {
  return e.is_constant() && e.evaluate(Bindings{}) == 0.0;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

class Collector {
 public:
  void add(std::string invariant, std::string message, std::optional<Point> witness = std::nullopt) {
    out.push_back({std::move(invariant), std::move(message), witness});
  }
  std::vector<Violation> out;
};

bool curve_uses_only_theta(const ScalarExpr& e) {
  return !e.uses(Variable::X) && !e.uses(Variable::Y) && !e.uses(Variable::R);
}

// Returns false if the curve could not be sampled at all.
bool check_curve(const char* label, const BoundaryCurve& curve, Collector& c,
                 std::vector<double>& radii) {
  if (!curve_uses_only_theta(curve.expr())) {
    c.add(std::string(label) + ".radius_variables", "boundary radius may only reference theta");
    return false;
  }
  radii.assign(kCurveSamples, 0.0);
  bool ok = true;
  bool reported_nonpositive = false;
  for (int k = 0; k < kCurveSamples; ++k) {
    const double th = kTwoPi * k / kCurveSamples;
    try {
      radii[k] = curve.radius(th);
    } catch (const Error& e) {
      c.add(std::string(label) + ".radius_evaluable", e.what(), Point{std::cos(th), std::sin(th)});
      return false;
    }
    if (!(radii[k] > 0.0) && !reported_nonpositive) {
      c.add(std::string(label) + ".radius_positive",
            "radius " + fmt(radii[k]) + " at theta=" + fmt(th), Point{0.0, 0.0});
      reported_nonpositive = true;
      ok = false;
    }
  }
  double rmax = 0.0;
  for (double r : radii) rmax = std::max(rmax, std::fabs(r));
  try {
    const double jump = std::fabs(curve.radius(0.0) - curve.radius(kTwoPi));
    if (jump > 1e-12 * rmax) {
      c.add(std::string(label) + ".radius_periodic",
            "radius differs by " + fmt(jump) + " between theta=0 and theta=2pi", curve.point(0.0));
      ok = false;
    }
  } catch (const Error& e) {
    c.add(std::string(label) + ".radius_evaluable", e.what());
    ok = false;
  }
  return ok;
}

void check_boundary_data(const char* label, const ScalarExpr& psi, const BoundaryCurve* curve,
                         Collector& c) {
  for (int k = 0; k < kCurveSamples; ++k) {
    const double th = kTwoPi * k / kCurveSamples;
    const Point p = curve ? curve->point(th) : Point{0.0, 0.0};
    try {
      const double v = psi.evaluate(Bindings::at(p));
      if (!std::isfinite(v)) throw DomainError("boundary data", v);
    } catch (const Error& e) {
      c.add(std::string(label) + ".evaluable", e.what(), p);
      return;
    }
  }
}

}  // namespace

bool EllipticOperator::first_order_free() const { return is_literal_zero(b1) && is_literal_zero(b2); }

bool EllipticOperator::zeroth_order_free() const { return !c || is_literal_zero(*c); }

double ScenarioSpec::psi_interior_at(double theta) const {
  if (!psi_interior) return 0.0;
  return psi_interior->evaluate(Bindings::at(domain.interior()->point(theta)));
}

double ScenarioSpec::psi_exterior_at(double theta) const {
  return psi_exterior.evaluate(Bindings::at(domain.exterior().point(theta)));
}

ValidationErrors::ValidationErrors(std::vector<Violation> violations)
    : Error("ValidationErrors",
            [&] {
              std::string msg = std::to_string(violations.size()) + " invariant violation(s)";
              for (const auto& v : violations) msg += "; " + v.invariant + ": " + v.message;
              return msg;
            }()),
      violations_(std::move(violations)) {}

std::vector<Violation> validate_scenario(const ScenarioSpec& spec) {
  Collector c;
  const DomainSpec& dom = spec.domain;

  std::vector<double> outer, inner;
  const bool outer_ok = check_curve("exterior", dom.exterior(), c, outer);
  bool inner_ok = true;
  if (dom.interior()) inner_ok = check_curve("interior", *dom.interior(), c, inner);

  bool geometry_ok = outer_ok && inner_ok;
  if (dom.interior() && outer_ok && inner_ok) {
    // Pointwise separation plus a grid-quality bound: the thinnest part of the
    // annulus may not be more than ten times thinner than the widest part.
    double min_gap = 1e300, max_gap = 0.0;
    int argmin = 0;
    for (int k = 0; k < kCurveSamples; ++k) {
      const double g = outer[k] - inner[k];
      if (g < min_gap) {
        min_gap = g;
        argmin = k;
      }
      max_gap = std::max(max_gap, g);
    }
    const double th = kTwoPi * argmin / kCurveSamples;
    const Point w{inner[argmin] * std::cos(th), inner[argmin] * std::sin(th)};
    if (!(min_gap > 0.0)) {
      c.add("domain.curves_disjoint", "exterior radius minus interior radius is " + fmt(min_gap) +
                                          " at theta=" + fmt(th), w);
      geometry_ok = false;
    } else if (min_gap < 0.1 * max_gap) {
      c.add("domain.curves_separated", "minimum radial gap " + fmt(min_gap) +
                                           " is below 0.1 x maximum gap " + fmt(max_gap), w);
      geometry_ok = false;
    }
  }

  if (dom.interior().has_value() != spec.psi_interior.has_value()) {
    c.add("boundary.interior_data", dom.interior() ? "annulus requires interior boundary data"
                                                   : "simply connected domain takes no interior boundary data");
  }
  if (outer_ok) check_boundary_data("boundary.exterior", spec.psi_exterior, &dom.exterior(), c);
  if (inner_ok && dom.interior() && spec.psi_interior)
    check_boundary_data("boundary.interior", *spec.psi_interior, &*dom.interior(), c);

  if (spec.grid.n_theta < 32) c.add("grid.n_theta", "n_theta must be at least 32");
  if (spec.grid.n_theta % 2 != 0) c.add("grid.n_theta_even", "n_theta must be even");
  if (spec.grid.n_s < 16) c.add("grid.n_s", "n_s must be at least 16");

  const ToleranceSet& t = spec.tol;
  auto positive = [&](const char* name, std::optional<double> v) {
    if (v && !(*v > 0.0)) c.add(std::string("tolerances.") + name, "must be strictly positive");
  };
  positive("grad_zero_tol", t.grad_zero_tol);
  positive("value_zero_tol", t.value_zero_tol);
  positive("dedup_radius", t.dedup_radius);
  positive("equal_extrema_tol", t.equal_extrema_tol);
  positive("linear_residual_tol", t.linear_residual_tol);
  positive("ellipticity_floor", t.ellipticity_floor);
  if (!(t.interior_margin > 0.0 && t.interior_margin <= 0.25))
    c.add("tolerances.interior_margin", "must lie in (0, 0.25]");

  if (geometry_ok) {
    bool elliptic_reported = false, c_reported = false, eval_reported = false;
    for (int j = 0; j < kInteriorSamples; ++j) {
      const double s = (j + 0.5) / kInteriorSamples;
      for (int i = 0; i < kInteriorSamples; ++i) {
        const double th = kTwoPi * (i + 0.5) / kInteriorSamples;
        const Point p = dom.map(th, s);
        const Bindings b = Bindings::at(p);
        try {
          const double a11 = spec.op.a11.evaluate(b);
          const double a12 = spec.op.a12.evaluate(b);
          const double a22 = spec.op.a22.evaluate(b);
          spec.op.b1.evaluate(b);
          spec.op.b2.evaluate(b);
          const double det = a11 * a22 - a12 * a12;
          if (!elliptic_reported && !(a11 > 0.0 && det >= t.ellipticity_floor)) {
            c.add("operator.elliptic", "a11=" + fmt(a11) + ", a11*a22-a12^2=" + fmt(det), p);
            elliptic_reported = true;
          }
          if (spec.op.c) {
            const double cv = spec.op.c->evaluate(b);
            if (!c_reported && cv > 0.0) {
              c.add("operator.c_nonpositive", "c=" + fmt(cv), p);
              c_reported = true;
            }
          }
        } catch (const Error& e) {
          if (!eval_reported) {
            c.add("operator.evaluable", e.what(), p);
            eval_reported = true;
          }
        }
      }
    }
  }
  return c.out;
}

const ScenarioSpec& require_valid(const ScenarioSpec& spec) {
  auto v = validate_scenario(spec);
  if (!v.empty()) throw ValidationErrors(std::move(v));
  return spec;
}

}  // namespace lslab
