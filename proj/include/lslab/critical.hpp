#pragma once

#include <string>
#include <vector>

#include "lslab/solver.hpp"

namespace lslab {

struct CriticalPoint {
  Point location;
  double value = 0;
  int multiplicity = 0;
  bool is_zero = false;
  double degree_radius = 0;
  double winding = 0;  // raw quadrature value before rounding
};

struct NearBoundarySuspect {
  Point location;
  double value = 0;
  double s = 0;  // reference radial coordinate
};

// Non-fatal per-seed or per-point problems (NewtonStall, DegreeAmbiguous,
// RadiusExhausted).
struct CriticalIssue {
  std::string kind;
  std::string message;
  Point location;
};

struct CriticalSearch {
  std::vector<CriticalPoint> points;  // sorted by value, then angle, then radius
  std::vector<NearBoundarySuspect> suspects;
  std::vector<CriticalIssue> issues;
  int seeds = 0;

  int total_multiplicity() const;
};

CriticalSearch find_critical_points(const SolutionField& field, const ResolvedTolerances& tol);

// Points of find_critical_points with |u| <= value_zero_tol.
std::vector<CriticalPoint> find_critical_zero_points(const SolutionField& field, const ResolvedTolerances& tol);
std::vector<CriticalPoint> zero_points_of(const CriticalSearch& search);

// Winding number of grad u along the circle |x - center| = radius, by
// trapezoidal quadrature of d arg(grad u). Throws OutsideDomain if the circle
// leaves the domain.
double gradient_winding(const SolutionField& field, Point center, double radius, int samples = 256);

struct MultiplicityResult {
  int multiplicity = 0;
  double winding = 0;
  double radius = 0;
};

// Negated gradient winding number on an adaptively chosen circle. `others`
// are the remaining critical points; the circle may not reach past half the
// distance to any of them. min_radius forces the circle to enclose a cluster.
// Throws DegreeAmbiguous or RadiusExhausted.
MultiplicityResult multiplicity(const SolutionField& field, Point p, const ResolvedTolerances& tol,
                                const std::vector<Point>& others = {}, double min_radius = 0.0);

// Deterministic ordering: values within equal_extrema_tol * scale tie and
// fall back to polar angle in [0, 2pi), then radius.
void sort_critical_points(std::vector<CriticalPoint>& points, double value_tol);

std::string critical_csv(const std::vector<CriticalPoint>& points);

}  // namespace lslab
