#include "lslab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace lslab {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int total_multiplicity(const std::vector<CriticalPoint>& pts) {
  int m = 0;
  for (const auto& p : pts) m += p.multiplicity;
  return m;
}

std::vector<int> all_indices(const std::vector<CriticalPoint>& pts) {
  std::vector<int> idx(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) idx[k] = static_cast<int>(k);
  return idx;
}

// Fills reason from the failed hypotheses; returns true when all held.
bool settle_hypotheses(TheoremVerdict& v) {
  std::string failed;
  for (const auto& h : v.hypotheses)
    if (!h.held) failed += (failed.empty() ? "" : "; ") + h.name;
  v.applicable = failed.empty();
  if (!v.applicable) v.reason = "hypothesis failed: " + failed;
  return v.applicable;
}

void compare(TheoremVerdict& v, long lhs, long rhs, const std::string& relation) {
  v.lhs = lhs;
  v.rhs = rhs;
  v.relation = relation;
  if (!v.applicable) return;
  if (relation == "<=") v.holds = lhs <= rhs;
  else if (relation == "==") v.holds = lhs == rhs;
  else if (relation == ">=") v.holds = lhs >= rhs;
  else v.holds = lhs >= rhs - 2 && lhs <= rhs;  // "in {rhs-2, rhs-1, rhs}"
}

CountCheck clause(double t, std::string name, long lhs, const std::string& rel, long rhs) {
  CountCheck c;
  c.t = t;
  c.clause = std::move(name);
  c.relation = rel;
  c.lhs = lhs;
  c.rhs = rhs;
  c.holds = rel == "==" ? lhs == rhs : (rel == ">=" ? lhs >= rhs : lhs <= rhs);
  return c;
}

// Settles a lemma verdict from its clause list: lhs = clauses that hold,
// rhs = clauses evaluated.
void settle_checks(TheoremVerdict& v) {
  long pass = 0;
  for (const auto& c : v.checks) pass += c.holds;
  v.lhs = pass;
  v.rhs = static_cast<long>(v.checks.size());
  v.relation = "==";
  if (v.applicable) v.holds = pass == *v.rhs;
}

struct ValueGroup {
  double t = 0;
  std::vector<int> members;  // indices into the point list
};

// Single-linkage grouping of critical values.
std::vector<ValueGroup> group_values(const std::vector<CriticalPoint>& pts, double tol) {
  std::vector<int> order = all_indices(pts);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return pts[a].value < pts[b].value; });
  std::vector<ValueGroup> out;
  for (int k : order) {
    if (out.empty() || pts[k].value - pts[out.back().members.back()].value > tol) out.push_back({});
    out.back().members.push_back(k);
  }
  for (auto& g : out) {
    double sum = 0;
    for (int k : g.members) sum += pts[k].value;
    g.t = sum / static_cast<double>(g.members.size());
  }
  return out;
}

// Tolerance for treating two critical values as equal.
double value_tolerance(const SolutionField& field, const ResolvedTolerances& tol) {
  return std::max(tol.equal_extrema_tol * tol.scale, 2.0 * field.interpolation_error());
}

struct GroupData {
  double t = 0;
  std::vector<Point> at;
  int sum_m = 0;
  int q = 0;
  LevelSetCensus census;
};

GroupData evaluate_group(const SolutionField& field, const std::vector<CriticalPoint>& pts, const ValueGroup& g,
                         int refine) {
  GroupData d;
  d.t = g.t;
  for (int k : g.members) {
    d.at.push_back(pts[k].location);
    d.sum_m += pts[k].multiplicity;
  }
  d.q = cluster_critical_sets(field, d.at, g.t);
  d.census = level_census(field, g.t, refine, d.at);
  return d;
}

const LevelComponent* encircling(const LevelSetCensus& c, LevelSign sign) {
  for (const auto& k : c.components)
    if (!k.uncertain && k.sign == sign && k.encircles_hole) return &k;
  return nullptr;
}

// A closed level curve separates the boundaries iff no component of either
// sign reaches both of them.
bool has_separating_curve(const LevelSetCensus& c) {
  for (const auto& k : c.components)
    if (!k.uncertain && k.touches_interior && k.touches_exterior) return false;
  return true;
}

void add_counts(TheoremVerdict& v, const std::string& prefix, const GroupData& d) {
  v.witness_counts.push_back({prefix + ".sum_m", d.sum_m});
  v.witness_counts.push_back({prefix + ".q", d.q});
  v.witness_counts.push_back({prefix + ".M1", d.census.M1});
  v.witness_counts.push_back({prefix + ".M2", d.census.M2});
}

void separated_upper(TheoremVerdict& v, const GroupData& d) {
  const LevelComponent* ring = encircling(d.census, LevelSign::Sub);
  const long m = d.sum_m;
  if (ring && ring->touches_exterior) {
    const long M1 = d.census.M1, M2 = d.census.M2;
    v.checks.push_back(clause(d.t, "case 2: M1 >= sum m + 1", M1, ">=", m + 1));
    v.checks.push_back(clause(d.t, "case 2: M2 >= sum m + 1", M2, ">=", m + 1));
    v.checks.push_back(clause(d.t, "case 2: M1 + M2 = 2 sum m + q + 1", M1 + M2, "==", 2 * m + d.q + 1));
  } else {
    const long n = d.census.count(LevelSign::Sub, true, false, true);
    v.checks.push_back(
        clause(d.t, "case 1: simply connected sub components meeting gamma_E = sum m + q - 1", n, "==", m + d.q - 1));
  }
}

void separated_lower(TheoremVerdict& v, const SolutionField& field, const GroupData& d, double z2, int refine) {
  const LevelComponent* ring = encircling(d.census, LevelSign::Super);
  const long m = d.sum_m;
  if (ring && !ring->touches_interior) {
    const long n = d.census.count(LevelSign::Super, true, true, false);
    v.checks.push_back(
        clause(d.t, "case 3: simply connected super components meeting gamma_I = sum m + q - 1", n, "==", m + d.q - 1));
  } else {
    const long M1 = interval_components(RefinedGrid(field, refine), d.t, z2, d.at);
    const long M2 = d.census.M2;
    v.witness_counts.push_back({"lower.components(t0 < u < z2)", M1});
    v.checks.push_back(clause(d.t, "case 4: #{t0 < u < z2} >= sum m + 1", M1, ">=", m + 1));
    v.checks.push_back(clause(d.t, "case 4: M2 >= sum m + 1", M2, ">=", m + 1));
    v.checks.push_back(clause(d.t, "case 4: #{t0 < u < z2} + M2 = 2 sum m + q + 1", M1 + M2, "==", 2 * m + d.q + 1));
  }
}

TheoremVerdict identities_separated(const SolutionField& field, const std::vector<CriticalPoint>& pts,
                                    const BoundaryProfile& profile, const std::vector<ValueGroup>& groups, double vtol,
                                    int refine, std::optional<double> only_t) {
  TheoremVerdict v;
  v.id = "lem_2_5";
  const double z1 = profile.interior->min, Z1 = profile.interior->max;
  const double z2 = profile.exterior.min, Z2 = profile.exterior.max;
  std::vector<const ValueGroup*> upper, lower;
  for (const auto& g : groups) {
    if (g.t > z2 + vtol && g.t < Z2) upper.push_back(&g);
    if (g.t > z1 && g.t < Z1 - vtol) lower.push_back(&g);
  }
  v.hypotheses.push_back({"z1 < Z1 <= z2 < Z2", true});
  v.hypotheses.push_back({"critical values in (z2, Z2) all equal", upper.size() <= 1});
  v.hypotheses.push_back({"critical values in (z1, Z1) all equal", lower.size() <= 1});
  v.hypotheses.push_back({"a critical point in (z1, Z1) or (z2, Z2)", !upper.empty() || !lower.empty()});
  if (!settle_hypotheses(v)) return v;
  auto wanted = [&](const ValueGroup* g) { return !only_t || std::fabs(g->t - *only_t) <= vtol; };
  if (!upper.empty() && wanted(upper[0])) {
    const GroupData d = evaluate_group(field, pts, *upper[0], refine);
    for (int k : upper[0]->members) v.witness_points.push_back(k);
    add_counts(v, "upper", d);
    separated_upper(v, d);
  }
  if (!lower.empty() && wanted(lower[0])) {
    const GroupData d = evaluate_group(field, pts, *lower[0], refine);
    for (int k : lower[0]->members) v.witness_points.push_back(k);
    add_counts(v, "lower", d);
    separated_lower(v, field, d, z2, refine);
  }
  if (v.checks.empty()) {
    v.applicable = false;
    v.reason = "no critical point at t in (z1, Z1) or (z2, Z2)";
  }
  settle_checks(v);
  return v;
}

TheoremVerdict identities_overlapping(const SolutionField& field, const std::vector<CriticalPoint>& pts,
                                      const BoundaryProfile& profile, const std::vector<ValueGroup>& groups,
                                      double vtol, int refine, std::optional<double> only_t) {
  TheoremVerdict v;
  v.id = "lem_2_7";
  const double z1 = profile.interior->min, Z1 = profile.interior->max;
  const double z2 = profile.exterior.min, Z2 = profile.exterior.max;
  v.hypotheses.push_back({"z1 < z2 < Z1 < Z2", true});
  v.hypotheses.push_back({"at most two distinct critical values", groups.size() <= 2});
  v.hypotheses.push_back({"at least one critical point", !groups.empty()});
  if (!settle_hypotheses(v)) return v;
  auto wanted = [&](const ValueGroup& g) { return !only_t || std::fabs(g.t - *only_t) <= vtol; };
  auto in = [](double t, double lo, double hi) { return t > lo && t < hi; };

  if (groups.size() == 1 && in(groups[0].t, z2 + vtol, Z1 - vtol)) {
    // All critical values equal t in (z2, Z1).
    if (!wanted(groups[0])) {
      v.applicable = false;
      v.reason = "no critical point at t";
      settle_checks(v);
      return v;
    }
    const GroupData d = evaluate_group(field, pts, groups[0], refine);
    v.witness_points = groups[0].members;
    add_counts(v, "t", d);
    const long m = d.sum_m, M1 = d.census.M1, M2 = d.census.M2;
    if (has_separating_curve(d.census)) {
      if (groups[0].members.size() < 2) {
        v.applicable = false;
        v.reason = "separating level curve carries fewer than two critical points";
        settle_checks(v);
        return v;
      }
      v.checks.push_back(clause(d.t, "case 3: M1 >= sum m", M1, ">=", m));
      v.checks.push_back(clause(d.t, "case 3: M2 >= sum m", M2, ">=", m));
      v.checks.push_back(clause(d.t, "case 3: M1 + M2 = 2 sum m + q - 1", M1 + M2, "==", 2 * m + d.q - 1));
    } else {
      v.checks.push_back(clause(d.t, "case 4: M1 >= sum m + 1", M1, ">=", m + 1));
      v.checks.push_back(clause(d.t, "case 4: M2 >= sum m + 1", M2, ">=", m + 1));
      v.checks.push_back(clause(d.t, "case 4: M1 + M2 = 2 sum m + q + 1", M1 + M2, "==", 2 * m + d.q + 1));
    }
    settle_checks(v);
    return v;
  }

  // Two bands t0 < t1 (either may be empty).
  const ValueGroup* g0 = nullptr;
  const ValueGroup* g1 = nullptr;
  for (const auto& g : groups) {
    if (in(g.t, z1, z2 + vtol) || (groups.size() == 2 && &g == &groups[0] && in(g.t, z2, Z1))) g0 = &g;
    else if (in(g.t, Z1 - vtol, Z2) || (groups.size() == 2 && &g == &groups[1] && in(g.t, z2, Z1))) g1 = &g;
  }
  const bool placed = (g0 != nullptr) + (g1 != nullptr) == static_cast<int>(groups.size());
  const bool both_inner = g0 && g1 && g0->t > z2 && g1->t < Z1;
  if (!placed || both_inner) {
    v.applicable = false;
    v.reason = "critical values do not fit t0 <= z2 < Z1 <= t1 or the mixed variants";
    settle_checks(v);
    return v;
  }
  std::optional<GroupData> d0, d1;
  if (g0) d0 = evaluate_group(field, pts, *g0, refine);
  if (g1) d1 = evaluate_group(field, pts, *g1, refine);
  const bool separating = (d0 && has_separating_curve(d0->census)) || (d1 && has_separating_curve(d1->census));
  if (d1 && wanted(*g1)) {
    for (int k : g1->members) v.witness_points.push_back(k);
    add_counts(v, "upper", *d1);
    const long m = d1->sum_m;
    if (separating)
      v.checks.push_back(clause(d1->t, "case 1: simply connected sub components meeting gamma_E >= sum m + q - 1",
                                d1->census.count(LevelSign::Sub, true, false, true), ">=", m + d1->q - 1));
    else
      v.checks.push_back(clause(d1->t, "case 2: simply connected super components meeting gamma_E >= sum m + 1",
                                d1->census.count(LevelSign::Super, true, false, true), ">=", m + 1));
  }
  if (d0 && wanted(*g0)) {
    for (int k : g0->members) v.witness_points.push_back(k);
    add_counts(v, "lower", *d0);
    const long m = d0->sum_m;
    if (separating)
      v.checks.push_back(clause(d0->t, "case 1: simply connected super components meeting gamma_I >= sum m + q - 1",
                                d0->census.count(LevelSign::Super, true, true, false), ">=", m + d0->q - 1));
    else
      v.checks.push_back(clause(d0->t, "case 2: simply connected sub components meeting gamma_I >= sum m + 1",
                                d0->census.count(LevelSign::Sub, true, true, false), ">=", m + 1));
  }
  if (v.checks.empty()) {
    v.applicable = false;
    v.reason = "no critical point at t";
  }
  settle_checks(v);
  return v;
}

IdentityReport identities(const SolutionField& field, const std::vector<CriticalPoint>& pts,
                          const BoundaryProfile& profile, const ResolvedTolerances& tol, int refine,
                          std::optional<double> only_t) {
  IdentityReport out;
  out.separated = not_applicable("lem_2_5", "");
  out.overlapping = not_applicable("lem_2_7", "");
  if (!profile.interior) {
    out.separated.reason = out.overlapping.reason = "simply connected domain";
    return out;
  }
  if (profile.interior->degenerate || profile.exterior.degenerate) {
    out.separated.reason = out.overlapping.reason = "degenerate boundary trace";
    return out;
  }
  const double vtol = value_tolerance(field, tol);
  const double slack = tol.equal_extrema_tol * tol.scale;
  if (only_t) {
    bool any = false;
    for (const auto& p : pts) any |= std::fabs(p.value - *only_t) <= vtol;
    if (!any) {
      out.separated.reason = out.overlapping.reason = "no critical point at t";
      return out;
    }
  }
  const std::vector<ValueGroup> groups = group_values(pts, vtol);
  const OrderingCase oc = ordering_case(profile, slack);
  if (oc == OrderingCase::Separated)
    out.separated = identities_separated(field, pts, profile, groups, vtol, refine, only_t);
  else
    out.separated.reason = "ordering case fails: Z1 > z2";
  if (oc == OrderingCase::Overlapping)
    out.overlapping = identities_overlapping(field, pts, profile, groups, vtol, refine, only_t);
  else
    out.overlapping.reason = "ordering case fails: z1 < z2 < Z1 < Z2 does not hold";
  return out;
}

bool nondegenerate(const BoundaryProfile& p) {
  return !p.exterior.degenerate && (!p.interior || !p.interior->degenerate);
}

std::vector<Hypothesis> trichotomy_hypotheses(const BoundaryProfile& profile) {
  std::vector<Hypothesis> h;
  h.push_back({"multiply connected domain", profile.interior.has_value()});
  h.push_back({"non-constant boundary traces", nondegenerate(profile)});
  if (!profile.interior || !nondegenerate(profile)) return h;
  const TraceProfile& in = *profile.interior;
  const TraceProfile& ex = profile.exterior;
  h.push_back({"equal maxima on gamma_I", in.equal_maxima});
  h.push_back({"equal minima on gamma_I", in.equal_minima});
  h.push_back({"equal maxima on gamma_E", ex.equal_maxima});
  h.push_back({"equal minima on gamma_E", ex.equal_minima});
  auto closure = [](const std::vector<TraceExtremum>& es) {
    return std::all_of(es.begin(), es.end(), [](const TraceExtremum& e) { return e.relative_to_closure; });
  };
  h.push_back({"maxima on gamma_I relative to the closure", closure(in.maxima)});
  h.push_back({"minima on gamma_I relative to the closure", closure(in.minima)});
  h.push_back({"maxima on gamma_E relative to the closure", closure(ex.maxima)});
  h.push_back({"minima on gamma_E relative to the closure", closure(ex.minima)});
  return h;
}

TheoremVerdict trichotomy(const std::string& id, const std::vector<CriticalPoint>& points,
                          const BoundaryProfile& profile, Hypothesis ordering) {
  TheoremVerdict v;
  v.id = id;
  v.hypotheses = trichotomy_hypotheses(profile);
  v.hypotheses.insert(v.hypotheses.begin() + std::min<std::size_t>(2, v.hypotheses.size()), ordering);
  v.witness_points = all_indices(points);
  settle_hypotheses(v);
  if (profile.interior && nondegenerate(profile)) {
    v.witness_counts = {{"N1", profile.interior->N()}, {"N2", profile.exterior.N()}};
    compare(v, total_multiplicity(points), profile.interior->N() + profile.exterior.N(), "in {rhs-2, rhs-1, rhs}");
  }
  return v;
}

}  // namespace

TheoremVerdict not_applicable(const std::string& id, const std::string& reason, std::vector<Hypothesis> hyps) {
  TheoremVerdict v;
  v.id = id;
  v.reason = reason;
  v.hypotheses = std::move(hyps);
  return v;
}

TheoremVerdict check_theorem_1_1(const std::vector<CriticalPoint>& points, const BoundaryProfile& profile) {
  TheoremVerdict v;
  v.id = "thm_1_1";
  v.hypotheses.push_back({"multiply connected domain", profile.interior.has_value()});
  v.hypotheses.push_back({"non-constant boundary traces", nondegenerate(profile)});
  settle_hypotheses(v);
  v.witness_points = all_indices(points);
  if (!v.applicable) return v;
  const int n1 = profile.interior->N(), n2 = profile.exterior.N();
  v.witness_counts = {{"N1", n1}, {"N2", n2}};
  compare(v, total_multiplicity(points), n1 + n2, "<=");
  return v;
}

TheoremVerdict check_theorem_1_2(const std::vector<CriticalPoint>& points, const BoundaryProfile& profile,
                                 double tol) {
  const bool ordered = profile.interior && nondegenerate(profile) && profile.exterior.min >= profile.interior->max - tol;
  return trichotomy("thm_1_2", points, profile, {"z2 >= Z1", ordered});
}

TheoremVerdict check_corollary_4_1(const std::vector<CriticalPoint>& points, const BoundaryProfile& profile,
                                   double tol) {
  const bool ordered = profile.interior && nondegenerate(profile) &&
                       ordering_case(profile, tol) == OrderingCase::Overlapping;
  return trichotomy("cor_4_1", points, profile, {"z1 < z2 < Z1 < Z2", ordered});
}

TheoremVerdict check_theorem_1_3(const std::vector<CriticalPoint>& zero_points, const BoundaryProfile& profile,
                                 std::optional<double> interior_value, double zero_tol) {
  TheoremVerdict v;
  v.id = "thm_1_3";
  v.hypotheses.push_back({"multiply connected domain", profile.interior.has_value()});
  v.hypotheses.push_back({"constant interior data H", interior_value.has_value()});
  v.hypotheses.push_back({"sign-changing exterior data", profile.exterior.sign_changing()});
  settle_hypotheses(v);
  v.witness_points = all_indices(zero_points);
  if (!v.applicable) return v;
  const int n = profile.exterior.sign_changes;
  const bool h_zero = std::fabs(*interior_value) <= zero_tol;
  v.witness_counts = {{"N_tilde", n}, {"H_is_zero", h_zero ? 1 : 0},
                      {"tangential_zeros", profile.exterior.tangential_zeros}};
  compare(v, total_multiplicity(zero_points), h_zero ? n / 2 - 1 : n / 2, "<=");
  return v;
}

TheoremVerdict check_theorem_1_4(const std::vector<CriticalPoint>& zero_points, const BoundaryProfile& profile) {
  TheoremVerdict v;
  v.id = "thm_1_4";
  v.hypotheses.push_back({"multiply connected domain", profile.interior.has_value()});
  v.hypotheses.push_back({"sign-changing interior data", profile.interior && profile.interior->sign_changing()});
  v.hypotheses.push_back({"sign-changing exterior data", profile.exterior.sign_changing()});
  settle_hypotheses(v);
  v.witness_points = all_indices(zero_points);
  if (!v.applicable) return v;
  const int n1 = profile.interior->sign_changes, n2 = profile.exterior.sign_changes;
  v.witness_counts = {{"N1_tilde", n1}, {"N2_tilde", n2}};
  compare(v, total_multiplicity(zero_points), (n1 + n2) / 2, "<=");
  return v;
}

TheoremVerdict check_remark_5_1(const std::vector<CriticalPoint>& zero_points, const BoundaryProfile& profile) {
  TheoremVerdict v;
  v.id = "rem_5_1";
  v.hypotheses.push_back({"simply connected domain", !profile.interior.has_value()});
  v.hypotheses.push_back({"sign-changing boundary data", profile.exterior.sign_changing()});
  settle_hypotheses(v);
  v.witness_points = all_indices(zero_points);
  if (!v.applicable) return v;
  const int n = profile.exterior.sign_changes;
  v.witness_counts = {{"N_tilde", n}};
  compare(v, total_multiplicity(zero_points), n / 2 - 1, "<=");
  return v;
}

TheoremVerdict check_band_exclusion(const std::vector<CriticalPoint>& points, const BoundaryProfile& profile,
                                    double tol, double delta) {
  TheoremVerdict v;
  v.id = "lem_2_4";
  const bool ordered = profile.interior && nondegenerate(profile) &&
                       ordering_case(profile, tol) == OrderingCase::Separated;
  v.hypotheses.push_back({"z1 < Z1 <= z2 < Z2", ordered});
  if (!settle_hypotheses(v)) return v;
  const double lo = profile.interior->max + delta, hi = profile.exterior.min - delta;
  long inside = 0;
  for (std::size_t k = 0; k < points.size(); ++k)
    if (points[k].value >= lo && points[k].value <= hi) {
      ++inside;
      v.witness_points.push_back(static_cast<int>(k));
    }
  compare(v, inside, 0, "==");
  return v;
}

IdentityReport check_counting_identities(const SolutionField& field, const std::vector<CriticalPoint>& points,
                                         const BoundaryProfile& profile, const ResolvedTolerances& tol, int refine) {
  return identities(field, points, profile, tol, refine, std::nullopt);
}

IdentityReport check_counting_identities(const SolutionField& field, const std::vector<CriticalPoint>& points,
                                         const BoundaryProfile& profile, const ResolvedTolerances& tol, double t,
                                         int refine) {
  return identities(field, points, profile, tol, refine, t);
}

bool VerificationReport::any_failed() const {
  return std::any_of(verdicts.begin(), verdicts.end(), [](const TheoremVerdict& v) { return v.failed(); });
}

const TheoremVerdict* VerificationReport::verdict(const std::string& id) const {
  for (const auto& v : verdicts)
    if (v.id == id) return &v;
  return nullptr;
}

std::string fingerprint(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

GridRun summarize(GridSize g, const CriticalSearch& cs) {
  GridRun r;
  r.grid = g;
  r.points = static_cast<int>(cs.points.size());
  for (const auto& p : cs.points) r.multiplicities.push_back(p.multiplicity);
  std::sort(r.multiplicities.begin(), r.multiplicities.end());
  return r;
}

TheoremVerdict local_structure_verdict(const SolutionField& field, const std::vector<CriticalPoint>& pts,
                                       std::vector<std::string>& warnings) {
  TheoremVerdict v;
  v.id = "lem_2_1";
  v.hypotheses.push_back({"at least one interior critical point", !pts.empty()});
  if (!settle_hypotheses(v)) return v;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    std::vector<Point> others;
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (j != k) others.push_back(pts[j].location);
    const long want = pts[k].multiplicity + 1;
    LocalStructure ls;
    try {
      ls = local_structure(field, pts[k], others);
    } catch (const RadiusExhausted& e) {
      warnings.push_back("RadiusExhausted: " + std::string(e.what()));
      ls = {-1, -1};
    }
    const std::string tag = "point " + std::to_string(k);
    v.witness_points.push_back(static_cast<int>(k));
    v.witness_counts.push_back({tag + ".supers", ls.supers});
    v.witness_counts.push_back({tag + ".subs", ls.subs});
    v.checks.push_back(clause(pts[k].value, tag + ": super components = m + 1", ls.supers, "==", want));
    v.checks.push_back(clause(pts[k].value, tag + ": sub components = m + 1", ls.subs, "==", want));
  }
  settle_checks(v);
  return v;
}

TheoremVerdict contact_verdict(const std::vector<CensusRecord>& censuses, const BoundaryProfile& profile, double tol) {
  TheoremVerdict v;
  v.id = "lem_2_2";
  std::string reason;
  for (const auto& rec : censuses) {
    const ContactReport r = check_component_contact(rec.census, profile, tol);
    if (!r.applicable) {
      if (reason.empty()) reason = r.reason;
      continue;
    }
    for (const auto& c : r.checks) {
      const auto& comp = rec.census.components[c.component];
      const bool super = comp.sign == LevelSign::Super;
      const bool want_ext = c.clause.find("gamma_E") != std::string::npos;
      CountCheck k;
      k.t = rec.census.t;
      k.clause = std::string(super ? "super" : "sub") + " component of " + std::to_string(comp.cells.size()) +
                 " cells: " + c.clause;
      k.relation = "==";
      k.lhs = want_ext ? comp.touches_exterior : comp.touches_interior;
      k.rhs = 1;
      k.holds = c.pass;
      v.checks.push_back(k);
    }
  }
  v.applicable = !v.checks.empty();
  if (!v.applicable) v.reason = reason.empty() ? "no census threshold in a contact interval" : reason;
  settle_checks(v);
  return v;
}

TheoremVerdict max_principle_verdict(const ScenarioSpec& spec, const std::vector<CensusRecord>& censuses,
                                     double slack) {
  TheoremVerdict v;
  v.id = "rem_1_5";
  v.hypotheses.push_back({"no first-order terms (b = 0)", spec.op.first_order_free()});
  v.hypotheses.push_back({"no zeroth-order term (c = 0)", spec.op.zeroth_order_free()});
  if (!settle_hypotheses(v)) return v;
  for (const auto& rec : censuses)
    for (const auto& comp : rec.census.components) {
      if (comp.uncertain) continue;
      const bool super = comp.sign == LevelSign::Super;
      const double gap = super ? comp.extremal_value - comp.contact_extremal_value
                               : comp.contact_extremal_value - comp.extremal_value;
      const bool ok = std::isfinite(comp.contact_extremal_value) && gap <= slack;
      CountCheck k;
      k.t = rec.census.t;
      k.clause = std::string(super ? "super component: max" : "sub component: min") + " of " +
                 std::to_string(comp.cells.size()) + " cells reached on boundary contact cells";
      k.relation = "==";
      k.lhs = ok;
      k.rhs = 1;
      k.holds = ok;
      v.checks.push_back(k);
    }
  if (v.checks.empty()) {
    v.applicable = false;
    v.reason = "no census components";
  }
  settle_checks(v);
  return v;
}

bool is_log_radius(const std::optional<ScalarExpr>& e) {
  if (!e) return false;
  std::string s = e->to_string();
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  return s == "log(r)" || s == "(log(r))";
}

}  // namespace

VerificationReport run_scenario(const ScenarioSpec& input, const RunOptions& options) {
  require_valid(input);
  ScenarioSpec spec = input;
  if (options.grad_zero_tol) spec.tol.grad_zero_tol = options.grad_zero_tol;
  const GridSize g1 = options.grid.value_or(spec.grid);
  const GridSize g2{2 * g1.n_theta, 2 * g1.n_s};

  VerificationReport rep;
  rep.name = spec.name;
  rep.fingerprint = fingerprint(spec.source);
  rep.refine = options.refine;
  rep.disk = !spec.domain.is_annulus();

  const SolutionField coarse = solve_scenario(spec, g1);
  const CriticalSearch cs_coarse = find_critical_points(coarse, resolve_tolerances(coarse));
  const SolutionField field = solve_scenario(spec, g2);
  rep.tol = resolve_tolerances(field);
  const CriticalSearch cs = find_critical_points(field, rep.tol);
  rep.coarse = summarize(g1, cs_coarse);
  rep.fine = summarize(g2, cs);
  rep.stable = rep.coarse.points == rep.fine.points && rep.coarse.multiplicities == rep.fine.multiplicities;
  rep.points = cs.points;
  rep.suspects = cs.suspects;
  for (const auto& issue : cs.issues) rep.warnings.push_back(issue.kind + ": " + issue.message);
  for (const auto& s : cs.suspects)
    rep.warnings.push_back("near-boundary suspect at (" + fmt(s.location.x) + ", " + fmt(s.location.y) +
                           ") u=" + fmt(s.value) + " s=" + fmt(s.s));
  if (!rep.stable)
    rep.warnings.push_back("UnstableCounts: " + std::to_string(rep.coarse.points) + " critical point(s) on " +
                           std::to_string(g1.n_theta) + "x" + std::to_string(g1.n_s) + " but " +
                           std::to_string(rep.fine.points) + " on " + std::to_string(g2.n_theta) + "x" +
                           std::to_string(g2.n_s));

  rep.profile = boundary_profile(spec, field);
  if (rep.profile.exterior.degenerate) rep.warnings.push_back("DegenerateTrace: exterior boundary data is constant");
  if (rep.profile.interior && rep.profile.interior->degenerate)
    rep.warnings.push_back("DegenerateTrace: interior boundary data is constant");

  const double slack = spec.tol.equal_extrema_tol * rep.tol.scale;
  const double eps = 10.0 * slack;
  const double vtol = value_tolerance(field, rep.tol);

  const RefinedGrid grid(field, options.refine);
  for (const ValueGroup& g : group_values(rep.points, vtol)) {
    std::vector<Point> at;
    for (int k : g.members) at.push_back(rep.points[k].location);
    rep.censuses.push_back({"below", level_census(grid, g.t - eps)});
    rep.censuses.push_back({"critical", level_census(grid, g.t, at)});
    rep.censuses.push_back({"above", level_census(grid, g.t + eps)});
  }
  // Thresholds inside each boundary range exercise the contact clauses even
  // without critical points.
  std::vector<double> probes;
  if (rep.profile.interior && nondegenerate(rep.profile)) {
    probes.push_back(0.5 * (rep.profile.interior->min + rep.profile.interior->max));
    probes.push_back(0.5 * (rep.profile.exterior.min + rep.profile.exterior.max));
  } else if (!rep.profile.exterior.degenerate) {
    probes.push_back(0.5 * (rep.profile.exterior.min + rep.profile.exterior.max));
  }
  if (probes.empty()) probes.push_back(0.5 * (field.min_value() + field.max_value()));
  for (double t : probes) {
    for (const auto& p : rep.points)
      if (std::fabs(p.value - t) <= 3 * eps) t = p.value + 3 * eps;
    rep.censuses.push_back({"probe", level_census(grid, t)});
  }
  for (const auto& rec : rep.censuses)
    for (const auto& w : rec.census.warnings) rep.warnings.push_back(w);

  std::vector<CriticalPoint> zeros;
  for (const auto& p : rep.points)
    if (p.is_zero) zeros.push_back(p);
  std::optional<double> h;
  if (spec.interior_is_constant()) h = spec.psi_interior_at(0.0);

  auto zero_indices = [&](TheoremVerdict v) {
    // Witness indices refer to the full point list.
    std::vector<int> idx;
    for (std::size_t k = 0; k < rep.points.size(); ++k)
      if (rep.points[k].is_zero) idx.push_back(static_cast<int>(k));
    v.witness_points = idx;
    return v;
  };

  rep.verdicts.push_back(check_theorem_1_1(rep.points, rep.profile));
  rep.verdicts.push_back(check_theorem_1_2(rep.points, rep.profile, slack));
  rep.verdicts.push_back(check_corollary_4_1(rep.points, rep.profile, slack));
  rep.verdicts.push_back(zero_indices(check_theorem_1_3(zeros, rep.profile, h, rep.tol.value_zero_tol)));
  rep.verdicts.push_back(zero_indices(check_theorem_1_4(zeros, rep.profile)));
  rep.verdicts.push_back(zero_indices(check_remark_5_1(zeros, rep.profile)));
  rep.verdicts.push_back(local_structure_verdict(field, rep.points, rep.warnings));
  rep.verdicts.push_back(contact_verdict(rep.censuses, rep.profile, slack));

  TheoremVerdict finite;
  finite.id = "lem_2_3";
  finite.applicable = true;
  finite.hypotheses.push_back({"multiplicities agree between grids", rep.coarse.multiplicities == rep.fine.multiplicities});
  finite.witness_counts = {{"coarse.points", rep.coarse.points}, {"fine.points", rep.fine.points}};
  compare(finite, rep.fine.points, rep.coarse.points, "==");
  finite.holds = rep.stable;
  rep.verdicts.push_back(finite);

  rep.verdicts.push_back(check_band_exclusion(rep.points, rep.profile, slack, slack));
  try {
    IdentityReport ids = check_counting_identities(field, rep.points, rep.profile, rep.tol, options.refine);
    rep.verdicts.push_back(std::move(ids.separated));
    rep.verdicts.push_back(std::move(ids.overlapping));
  } catch (const BandTooWide& e) {
    rep.warnings.push_back("BandTooWide: " + std::string(e.what()));
    rep.verdicts.push_back(not_applicable("lem_2_5", "BandTooWide: " + std::string(e.what())));
    rep.verdicts.push_back(not_applicable("lem_2_7", "BandTooWide: " + std::string(e.what())));
  }
  rep.verdicts.push_back(max_principle_verdict(spec, rep.censuses, 2.0 * field.interpolation_error() + slack));

  rep.notes.push_back("critical points, profile and censuses are from the " + std::to_string(g2.n_theta) + "x" +
                      std::to_string(g2.n_s) + " grid; the " + std::to_string(g1.n_theta) + "x" +
                      std::to_string(g1.n_s) + " grid is used for the stability check");
  rep.notes.push_back("near-critical censuses at t +/- " + fmt(eps) + "; critical values equal within " + fmt(vtol));
  if (is_log_radius(spec.psi_interior) && is_log_radius(spec.psi_exterior))
    rep.notes.push_back(
        "u = log r, so the minimum of the exterior trace on r = R2 + sin(k theta) is z2 = log(R2 - 1), not "
        "log sqrt(R2 - 1); the analytic value is used");
  return rep;
}

}  // namespace lslab
