#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lslab/critical.hpp"
#include "lslab/topology.hpp"

namespace lslab {

struct Hypothesis {
  std::string name;
  bool held = false;
};

// One counting clause evaluated at a single threshold.
struct CountCheck {
  double t = 0;
  std::string clause;    // e.g. "case 2: M1 + M2 = 2 sum m + q + 1"
  std::string relation;  // "==", "<=", ">="
  long lhs = 0;
  long rhs = 0;
  bool holds = false;
};

struct TheoremVerdict {
  std::string id;
  bool applicable = false;
  std::string reason;  // failed hypothesis when not applicable
  std::vector<Hypothesis> hypotheses;
  std::string relation;  // how lhs compares to rhs
  std::optional<long> lhs, rhs;
  std::optional<bool> holds;  // set only when applicable
  std::vector<int> witness_points;  // indices into the report's critical point list
  std::vector<std::pair<std::string, long>> witness_counts;
  std::vector<CountCheck> checks;  // per-threshold clauses for lemma checks

  bool failed() const { return applicable && holds && !*holds; }
};

TheoremVerdict not_applicable(const std::string& id, const std::string& reason, std::vector<Hypothesis> hyps = {});

// Bounds on the interior critical points. For the zero-point bounds pass only
// critical zero points.
TheoremVerdict check_theorem_1_1(const std::vector<CriticalPoint>& points, const BoundaryProfile& profile);
TheoremVerdict check_theorem_1_2(const std::vector<CriticalPoint>& points, const BoundaryProfile& profile, double tol);
TheoremVerdict check_corollary_4_1(const std::vector<CriticalPoint>& points, const BoundaryProfile& profile, double tol);
// `interior_value` is the constant interior data H, absent when the interior
// data is not constant.
TheoremVerdict check_theorem_1_3(const std::vector<CriticalPoint>& zero_points, const BoundaryProfile& profile,
                                 std::optional<double> interior_value, double zero_tol);
TheoremVerdict check_theorem_1_4(const std::vector<CriticalPoint>& zero_points, const BoundaryProfile& profile);
TheoremVerdict check_remark_5_1(const std::vector<CriticalPoint>& zero_points, const BoundaryProfile& profile);

// No critical value in [Z1 + delta, z2 - delta] when z1 < Z1 <= z2 < Z2.
TheoremVerdict check_band_exclusion(const std::vector<CriticalPoint>& points, const BoundaryProfile& profile,
                                    double tol, double delta);

// Counting identities of the two ordering cases at the critical values.
// Checks are asserted only when all critical values in a band are equal.
struct IdentityReport {
  TheoremVerdict separated;    // z1 < Z1 <= z2 < Z2
  TheoremVerdict overlapping;  // z1 < z2 < Z1 < Z2
};
IdentityReport check_counting_identities(const SolutionField& field, const std::vector<CriticalPoint>& points,
                                         const BoundaryProfile& profile, const ResolvedTolerances& tol, int refine = 2);
// Clauses at one threshold t; not applicable when no point has value t.
IdentityReport check_counting_identities(const SolutionField& field, const std::vector<CriticalPoint>& points,
                                         const BoundaryProfile& profile, const ResolvedTolerances& tol, double t,
                                         int refine = 2);

struct CensusRecord {
  std::string kind;  // "critical", "below", "above", "probe"
  LevelSetCensus census;
};

struct RunOptions {
  std::optional<GridSize> grid;
  std::optional<double> grad_zero_tol;
  int refine = 2;  // census refinement factor
};

struct GridRun {
  GridSize grid;
  int points = 0;
  std::vector<int> multiplicities;
};

struct VerificationReport {
  std::string name;
  std::string fingerprint;  // FNV-1a 64 of the scenario text, hex
  GridRun coarse, fine;
  bool stable = true;  // counts and multiplicities agree between the grids
  int refine = 2;
  ResolvedTolerances tol;
  bool disk = false;
  BoundaryProfile profile;
  std::vector<CriticalPoint> points;
  std::vector<NearBoundarySuspect> suspects;
  std::vector<CensusRecord> censuses;
  std::vector<TheoremVerdict> verdicts;
  std::vector<std::string> warnings;
  std::vector<std::string> notes;

  bool any_failed() const;
  const TheoremVerdict* verdict(const std::string& id) const;
};

std::string fingerprint(const std::string& text);

// Solves on the configured grid and on a twice finer one; the finer results
// are reported. When the two disagree the report has stable = false and
// lem_2_3 fails.
VerificationReport run_scenario(const ScenarioSpec& spec, const RunOptions& options = {});

}  // namespace lslab
