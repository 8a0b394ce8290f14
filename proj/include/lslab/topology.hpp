#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lslab/critical.hpp"
#include "lslab/solver.hpp"

namespace lslab {

// Cells of the solver grid subdivided `factor` times in both directions.
// Cell (a, b) covers theta in [a, a+1) * dtheta, s in [b, b+1) * ds; values
// are interpolant samples at cell centers. Disk layouts get one extra cell
// for the center point, adjacent to every cell of ring b = 0.
class RefinedGrid {
 public:
  RefinedGrid(const SolutionField& field, int factor);

  int factor() const { return factor_; }
  int n_theta() const { return nt_; }
  int n_s() const { return ns_; }
  bool disk() const { return disk_; }
  int cells() const { return nt_ * ns_ + (disk_ ? 1 : 0); }
  int center_cell() const { return nt_ * ns_; }  // disk only
  int cell(int a, int b) const;                  // a taken modulo n_theta
  int col(int c) const { return c % nt_; }
  int row(int c) const { return c / nt_; }
  double theta(int a) const { return dtheta_ * (a + 0.5); }
  double s(int b) const { return ds_ * (b + 0.5); }
  double value(int c) const { return values_[c]; }
  Point center(int c) const;
  const SolutionField& field() const { return *field_; }

 private:
  const SolutionField* field_;
  int factor_, nt_, ns_;
  bool disk_;
  double dtheta_, ds_;
  std::vector<double> values_;
};

enum class LevelSign { Super, Sub };

struct LevelComponent {
  LevelSign sign = LevelSign::Super;
  std::vector<int> cells;  // indices into the RefinedGrid
  bool touches_interior = false;
  bool touches_exterior = false;
  bool encircles_hole = false;  // winds once around the hole (or disk center)
  bool uncertain = false;       // every cell lies within the interpolation band
  double extremal_value = 0;    // max of u for super, min for sub components
  double contact_extremal_value = 0;  // same, over boundary-ring cells only
};

struct LevelSetCensus {
  double t = 0;
  int refine = 2;
  std::vector<LevelComponent> components;  // uncertain ones are listed but not counted
  int M1 = 0;
  int M2 = 0;
  std::vector<std::string> warnings;

  int count(LevelSign sign, bool simply_connected_only, bool need_interior, bool need_exterior) const;
};

// Cells within two refined cell diagonals of a point in `on_level` (critical
// points with value t) are left unclassified so that the sectors meeting at
// a critical point stay separate.
LevelSetCensus level_census(const SolutionField& field, double t, int refine = 2,
                            const std::vector<Point>& on_level = {});
LevelSetCensus level_census(const RefinedGrid& grid, double t, const std::vector<Point>& on_level = {});

// Components of {lo < u < hi}, with the same exclusion around `on_level`
// points as level_census.
int interval_components(const RefinedGrid& grid, double lo, double hi, const std::vector<Point>& on_level = {});

// Number of connected pieces of the level set {u = t} (cells crossed by the
// level line) that contain at least one of `points`. Compares refinements 2
// and 4 and throws BandTooWide when they disagree.
int cluster_critical_sets(const SolutionField& field, const std::vector<Point>& points, double t);
int cluster_critical_sets(const SolutionField& field, const std::vector<Point>& points, double t, int refine);

struct Polyline {
  std::vector<Point> points;
  bool closed = false;
};

struct LevelLines {
  double t = 0;
  std::vector<Polyline> lines;
  std::vector<std::string> warnings;
};

// Marching squares on refined grid nodes; ambiguous saddle cells are
// resolved by the interpolant at the cell center.
LevelLines trace_level_lines(const SolutionField& field, double t, int refine = 2);

struct TraceExtremum {
  double theta = 0;
  double value = 0;
  bool relative_to_closure = false;
};

struct TraceProfile {
  std::vector<TraceExtremum> maxima;
  std::vector<TraceExtremum> minima;
  std::vector<double> zero_angles;  // sign changes
  int sign_changes = 0;
  int tangential_zeros = 0;
  double min = 0, max = 0;
  bool equal_maxima = false;
  bool equal_minima = false;
  bool degenerate = false;  // constant trace, extremum counts undefined
  bool sign_changing() const { return min < 0 && max > 0 && sign_changes > 0; }
  int N() const { return static_cast<int>(maxima.size()); }
};

struct BoundaryProfile {
  std::optional<TraceProfile> interior;  // absent for disk domains
  TraceProfile exterior;
};

// Extrema of a periodic trace with hysteresis equal_tol * (max - min),
// refined by golden-section search; zeros with |psi| <= zero_tol that do not
// change sign count as tangential.
TraceProfile trace_profile(const std::function<double(double)>& psi, int samples, double equal_tol, double zero_tol);
BoundaryProfile boundary_profile(const ScenarioSpec& spec, const SolutionField& field, int samples = 4096);
void require_nondegenerate(const TraceProfile& trace, const std::string& which);

enum class OrderingCase {
  Separated,    // z1 < Z1 <= z2 < Z2
  Overlapping,  // z1 < z2 < Z1 < Z2
  Other,
};
// Comparisons between boundary ranges allow a slack of `tol`.
OrderingCase ordering_case(const BoundaryProfile& profile, double tol);
std::string to_string(OrderingCase c);

struct ContactCheck {
  int component = 0;  // index into census.components
  std::string clause;
  bool pass = true;
};

struct ContactReport {
  bool applicable = false;
  std::string reason;  // why not applicable
  std::vector<ContactCheck> checks;
  bool holds() const;
};

// Boundary-contact clauses for super/sub components at census.t under the
// ordering case of the profile.
ContactReport check_component_contact(const LevelSetCensus& census, const BoundaryProfile& profile, double tol);

struct LocalStructure {
  int supers = 0;
  int subs = 0;
};

// Components of {u > u(p)} and {u < u(p)} in the annulus rho/4 < |x - p| < rho.
// Throws RadiusExhausted if one of `others` lies within rho or the annulus
// leaves the domain.
LocalStructure local_structure(const SolutionField& field, Point p, double rho, const std::vector<Point>& others = {});
LocalStructure local_structure(const SolutionField& field, const CriticalPoint& cp,
                               const std::vector<Point>& others = {});

}  // namespace lslab
