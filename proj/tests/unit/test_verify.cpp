#include <regex>
#include <set>

#include "doctest.h"
#include "lslab/render.hpp"
#include "lslab/report.hpp"
#include "lslab/scenario_io.hpp"

using namespace lslab;

namespace {

ScenarioSpec builtin(const std::string& name) {
  return load_scenario(std::string(LSLAB_SOURCE_DIR) + "/scenarios/" + name + ".json");
}

ScenarioSpec extra(const std::string& name) {
  return load_scenario(std::string(LSLAB_SOURCE_DIR) + "/tests/scenarios/" + name + ".json");
}

struct Solved {
  SolutionField field;
  ResolvedTolerances tol;
  CriticalSearch search;
  BoundaryProfile profile;
};

Solved run(const ScenarioSpec& s) {
  SolutionField f = solve_scenario(s);
  ResolvedTolerances tol = resolve_tolerances(f);
  CriticalSearch cs = find_critical_points(f, tol);
  BoundaryProfile p = boundary_profile(s, f);
  return {std::move(f), tol, std::move(cs), std::move(p)};
}

TraceExtremum ext(double theta, double value) {
  TraceExtremum e;
  e.theta = theta;
  e.value = value;
  e.relative_to_closure = true;
  return e;
}

// Interior: one max 0.1, one min -0.1. Exterior: two maxima 6, two minima 4.
BoundaryProfile ideal_profile() {
  BoundaryProfile p;
  TraceProfile in;
  in.maxima = {ext(1.5, 0.1)};
  in.minima = {ext(4.7, -0.1)};
  in.min = -0.1;
  in.max = 0.1;
  in.equal_maxima = in.equal_minima = true;
  in.sign_changes = 2;
  p.interior = in;
  p.exterior.maxima = {ext(0, 6), ext(3.1, 6)};
  p.exterior.minima = {ext(1.5, 4), ext(4.7, 4)};
  p.exterior.min = 4;
  p.exterior.max = 6;
  p.exterior.equal_maxima = p.exterior.equal_minima = true;
  return p;
}

std::vector<CriticalPoint> fake_points(int n, int m = 1) {
  std::vector<CriticalPoint> pts(n);
  for (auto& p : pts) p.multiplicity = m;
  return pts;
}

}  // namespace

TEST_CASE("theorem 1.1 on Re(z + 1/z) holds with equality") {
  const Solved r = run(builtin("z_plus_inv"));
  const TheoremVerdict v = check_theorem_1_1(r.search.points, r.profile);
  REQUIRE(v.applicable);
  CHECK(*v.holds);
  CHECK(*v.lhs == 2);
  CHECK(*v.rhs == 2);
}

TEST_CASE("theorem 1.1 counts against injected points") {
  const Solved r = run(builtin("counterexample1"));
  const TheoremVerdict ok = check_theorem_1_1(r.search.points, r.profile);
  CHECK(*ok.holds);
  CHECK(*ok.lhs == 0);
  CHECK(*ok.rhs == 7);
  const TheoremVerdict bad = check_theorem_1_1(fake_points(8), r.profile);
  CHECK(bad.applicable);
  CHECK_FALSE(*bad.holds);
  CHECK(bad.failed());
}

TEST_CASE("trichotomy on a profile meeting every hypothesis") {
  const BoundaryProfile p = ideal_profile();
  const TheoremVerdict v = check_theorem_1_2(fake_points(2), p, 1e-9);
  REQUIRE(v.applicable);
  CHECK(*v.rhs == 3);
  CHECK(*v.holds);  // 2 = N - 1
  CHECK(*check_theorem_1_2(fake_points(1), p, 1e-9).holds);
  CHECK(*check_theorem_1_2(fake_points(3), p, 1e-9).holds);
  CHECK_FALSE(*check_theorem_1_2(fake_points(0), p, 1e-9).holds);
  CHECK_FALSE(*check_theorem_1_2(fake_points(4), p, 1e-9).holds);
  // The same profile is not in the overlapping case.
  CHECK_FALSE(check_corollary_4_1(fake_points(2), p, 1e-9).applicable);
}

TEST_CASE("trichotomy hypotheses that fail") {
  BoundaryProfile p = ideal_profile();
  p.exterior.minima[0].relative_to_closure = false;
  const TheoremVerdict v = check_theorem_1_2(fake_points(2), p, 1e-9);
  CHECK_FALSE(v.applicable);
  CHECK_FALSE(v.holds.has_value());
  CHECK(v.reason.find("relative to the closure") != std::string::npos);

  BoundaryProfile flat = ideal_profile();
  flat.interior->degenerate = true;
  CHECK_FALSE(check_theorem_1_2(fake_points(2), flat, 1e-9).applicable);

  BoundaryProfile unequal = ideal_profile();
  unequal.exterior.equal_maxima = false;
  CHECK(check_theorem_1_2(fake_points(2), unequal, 1e-9).reason.find("equal maxima on gamma_E") !=
        std::string::npos);
}

TEST_CASE("trichotomy is not asserted on the counterexamples") {
  const Solved c1 = run(builtin("counterexample1"));
  const TheoremVerdict v1 = check_theorem_1_2(c1.search.points, c1.profile, 1e-9);
  CHECK_FALSE(v1.applicable);
  CHECK(v1.reason.find("relative to the closure") != std::string::npos);
  const Solved c2 = run(builtin("counterexample2"));
  const TheoremVerdict v2 = check_corollary_4_1(c2.search.points, c2.profile, 1e-9);
  CHECK_FALSE(v2.applicable);
  CHECK(v2.reason.find("z1 < z2 < Z1 < Z2") == std::string::npos);
  CHECK(v2.reason.find("relative to the closure") != std::string::npos);
}

TEST_CASE("theorem 1.3 with constant interior data") {
  // u = (4/15)(r^2 - r^-2) cos 2theta has no critical zero point inside.
  const Solved h0 = run(extra("zero_inner_cos2"));
  const TheoremVerdict v0 =
      check_theorem_1_3(zero_points_of(h0.search), h0.profile, 0.0, h0.tol.value_zero_tol);
  REQUIRE(v0.applicable);
  CHECK(*v0.lhs == 0);
  CHECK(*v0.rhs == 1);
  CHECK(*v0.holds);

  const Solved h1 = run(extra("unit_inner_cos2"));
  const TheoremVerdict v1 =
      check_theorem_1_3(zero_points_of(h1.search), h1.profile, 1.0, h1.tol.value_zero_tol);
  REQUIRE(v1.applicable);
  CHECK(*v1.rhs == 2);
  CHECK(*v1.holds);

  const Solved z2 = run(builtin("z2_minus_zm2"));
  CHECK_FALSE(check_theorem_1_3(zero_points_of(z2.search), z2.profile, std::nullopt, 0.0).applicable);
}

TEST_CASE("theorem 1.4 bounds") {
  const Solved z2 = run(builtin("z2_minus_zm2"));
  const TheoremVerdict v = check_theorem_1_4(zero_points_of(z2.search), z2.profile);
  REQUIRE(v.applicable);
  CHECK(*v.lhs == 4);
  CHECK(*v.rhs == 4);
  CHECK(*v.holds);

  const Solved zp = run(builtin("z_plus_inv"));
  const TheoremVerdict w = check_theorem_1_4(zero_points_of(zp.search), zp.profile);
  REQUIRE(w.applicable);
  CHECK(*w.lhs == 0);
  CHECK(*w.rhs == 2);

  const Solved band = run(builtin("band_annulus"));
  CHECK_FALSE(check_theorem_1_4(zero_points_of(band.search), band.profile).applicable);
}

TEST_CASE("disk zero-point bound") {
  const Solved z2 = run(builtin("disk_z2"));
  const TheoremVerdict a = check_remark_5_1(zero_points_of(z2.search), z2.profile);
  REQUIRE(a.applicable);
  CHECK(*a.lhs == 1);
  CHECK(*a.rhs == 1);
  CHECK(*a.holds);

  const Solved z3 = run(builtin("disk_z3"));
  const TheoremVerdict b = check_remark_5_1(zero_points_of(z3.search), z3.profile);
  REQUIRE(b.applicable);
  CHECK(*b.lhs == 2);
  CHECK(*b.rhs == 2);

  const Solved pos = run(extra("disk_positive"));
  CHECK_FALSE(check_remark_5_1(zero_points_of(pos.search), pos.profile).applicable);
}

TEST_CASE("no critical value between the boundary ranges") {
  for (const char* name : {"saddle_ring2", "saddle_ring3", "pocket_saddle"}) {
    const Solved r = run(extra(name));
    const double delta = r.tol.equal_extrema_tol * r.tol.scale;
    const TheoremVerdict v = check_band_exclusion(r.search.points, r.profile, delta, delta);
    REQUIRE_MESSAGE(v.applicable, name);
    CHECK(*v.holds);
  }
  BoundaryProfile p = ideal_profile();
  std::vector<CriticalPoint> pts = fake_points(1);
  pts[0].value = 2.0;  // between Z1 = 0.1 and z2 = 4
  const TheoremVerdict v = check_band_exclusion(pts, p, 1e-9, 1e-6);
  CHECK_FALSE(*v.holds);
  CHECK(v.witness_points == std::vector<int>{0});
}

TEST_CASE("counting identity when the sub-level ring meets the exterior curve") {
  const Solved r = run(extra("pocket_saddle"));
  REQUIRE(r.search.points.size() == 1);
  const IdentityReport ids = check_counting_identities(r.field, r.search.points, r.profile, r.tol);
  const TheoremVerdict& v = ids.separated;
  REQUIRE(v.applicable);
  CHECK(*v.holds);
  bool identity = false;
  for (const auto& c : v.checks)
    if (c.clause.find("M1 + M2 = 2 sum m + q + 1") != std::string::npos) {
      identity = true;
      CHECK(c.lhs == 4);
      CHECK(c.rhs == 4);
    }
  CHECK(identity);
  CHECK_FALSE(ids.overlapping.applicable);
}

TEST_CASE("counting identity with a closed ring around the hole") {
  for (auto [name, points] : {std::pair{"saddle_ring2", 2}, std::pair{"saddle_ring3", 3}}) {
    const Solved r = run(extra(name));
    REQUIRE(static_cast<int>(r.search.points.size()) == points);
    const TheoremVerdict v = check_counting_identities(r.field, r.search.points, r.profile, r.tol).separated;
    REQUIRE_MESSAGE(v.applicable, name);
    REQUIRE(v.checks.size() == 1);
    CHECK(v.checks[0].clause.find("case 1") == 0);
    CHECK(v.checks[0].lhs == points);
    CHECK(v.checks[0].holds);
  }
}

TEST_CASE("counting identities that do not apply") {
  const Solved r = run(builtin("z_plus_inv"));
  const IdentityReport ids = check_counting_identities(r.field, r.search.points, r.profile, r.tol, r.search.points.at(0).value);
  CHECK_FALSE(ids.separated.applicable);
  INFO(ids.separated.reason);
  CHECK(ids.separated.reason.find("ordering case fails: Z1 > z2") == 0);

  const Solved p = run(extra("pocket_saddle"));
  const IdentityReport none = check_counting_identities(p.field, p.search.points, p.profile, p.tol, 0.5);
  CHECK_FALSE(none.separated.applicable);
  CHECK(none.separated.reason == "no critical point at t");
}

TEST_CASE("report of the first counterexample") {
  const VerificationReport rep = run_scenario(builtin("counterexample1"));
  CHECK(rep.points.empty());
  CHECK(rep.stable);
  CHECK(*rep.verdict("thm_1_1")->holds);
  CHECK_FALSE(rep.verdict("thm_1_2")->applicable);
  CHECK_FALSE(rep.verdict("thm_1_2")->reason.empty());
  CHECK_FALSE(rep.any_failed());
  bool typo_note = false;
  for (const auto& n : rep.notes) typo_note |= n.find("log(R2 - 1)") != std::string::npos;
  CHECK(typo_note);
  const auto j = report_json(rep, "T");
  CHECK(j["critical_points"].is_array());
  CHECK(j["critical_points"].empty());
  CHECK(report_text(rep, "T").find("\"critical_points\": []") != std::string::npos);
}

TEST_CASE("report of the second counterexample") {
  const VerificationReport rep = run_scenario(builtin("counterexample2"));
  CHECK(rep.points.empty());
  CHECK_FALSE(rep.verdict("cor_4_1")->applicable);
  CHECK(rep.verdict("cor_4_1")->reason.find("relative to the closure") != std::string::npos);
}

TEST_CASE("report of Re(z^2 - z^-2)") {
  const VerificationReport rep = run_scenario(builtin("z2_minus_zm2"));
  REQUIRE(rep.points.size() == 4);
  const TheoremVerdict* t14 = rep.verdict("thm_1_4");
  CHECK(*t14->holds);
  CHECK(*t14->lhs == 4);
  CHECK(*t14->rhs == 4);
  const TheoremVerdict* local = rep.verdict("lem_2_1");
  CHECK(*local->holds);
  CHECK(local->checks.size() == 8);
  for (const auto& [k, n] : local->witness_counts) CHECK_MESSAGE(n == 2, k);
}

TEST_CASE("every check appears exactly once and verdicts are self-consistent") {
  const std::vector<std::string> ids = {"thm_1_1", "thm_1_2", "cor_4_1", "thm_1_3", "thm_1_4", "rem_5_1", "lem_2_1",
                                        "lem_2_2", "lem_2_3", "lem_2_4", "lem_2_5", "lem_2_7", "rem_1_5"};
  for (const char* name : {"z_plus_inv", "disk_z3", "band_annulus"}) {
    const VerificationReport rep = run_scenario(builtin(name));
    REQUIRE(rep.verdicts.size() == ids.size());
    for (std::size_t k = 0; k < ids.size(); ++k) CHECK(rep.verdicts[k].id == ids[k]);
    for (const auto& v : rep.verdicts) {
      if (!v.applicable) {
        CHECK_MESSAGE(!v.reason.empty(), v.id);
        CHECK_FALSE(v.holds.has_value());
      } else {
        CHECK_MESSAGE(v.holds.has_value(), v.id);
      }
    }
    // Lhs of the multiplicity bounds recomputed from the raw point list.
    int total = 0;
    for (const auto& p : rep.points) total += p.multiplicity;
    const TheoremVerdict* t11 = rep.verdict("thm_1_1");
    if (t11->applicable) {
      CHECK(*t11->lhs == total);
      CHECK(*t11->rhs == rep.profile.interior->N() + rep.profile.exterior.N());
    }
    const TheoremVerdict* fin = rep.verdict("lem_2_3");
    CHECK(*fin->lhs == static_cast<long>(rep.points.size()));
  }
}

TEST_CASE("report json layout and number formatting") {
  const VerificationReport rep = run_scenario(builtin("z_plus_inv"));
  const auto j = report_json(rep, "2026-01-01T00:00:00Z");
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"scenario", "grid", "boundary_profile", "critical_points", "censuses",
                                         "verdicts", "warnings", "notes"});
  const auto& v = j["verdicts"][0];
  CHECK(v["id"] == "thm_1_1");
  CHECK(v["holds"] == true);
  CHECK(v["lhs"] == 2);
  CHECK(v["rhs"] == 2);
  CHECK(j["verdicts"][0].dump().find(R"({"id":"thm_1_1","holds":true,"lhs":2,"rhs":2)") == 0);

  const std::string text = report_text(rep, "2026-01-01T00:00:00Z");
  const std::regex number(R"([-]?([0-9]+)\.?([0-9]*)(e[-+]?[0-9]+)?)");
  const std::regex digits_only(R"([0-9.]+)");
  for (std::sregex_iterator it(text.begin(), text.end(), number), end; it != end; ++it) {
    std::string mantissa = (*it)[1].str() + (*it)[2].str();
    mantissa.erase(0, mantissa.find_first_not_of('0'));
    CHECK_MESSAGE(mantissa.size() <= 12, it->str());
  }
  CHECK(sig12(0.1 + 0.2) == 0.3);
  CHECK(sig12(-1e-30) == -1e-30);
}

TEST_CASE("reports are deterministic apart from the timestamp") {
  const ScenarioSpec s = extra("saddle_ring2");
  const std::string a = report_text(run_scenario(s), "A");
  const std::string b = report_text(run_scenario(s), "A");
  CHECK(a == b);
  const std::string c = report_text(run_scenario(s), "B");
  CHECK(a != c);
}

TEST_CASE("unwritable report path") {
  const VerificationReport rep = run_scenario(builtin("disk_z2"));
  CHECK_THROWS_AS(emit_report(rep, "/nonexistent-dir/sub/report.json", "T"), IoError);
}

TEST_CASE("fingerprint is FNV-1a 64") {
  CHECK(fingerprint("") == "cbf29ce484222325");
  CHECK(fingerprint("a") == "af63dc4c8601ec8c");
}

TEST_CASE("svg rendering") {
  const ScenarioSpec s = builtin("z2_minus_zm2");
  const SolutionField f = solve_scenario(s);
  const CriticalSearch cs = find_critical_points(f, resolve_tolerances(f));
  auto count = [](const std::string& text, const std::string& what) {
    int n = 0;
    for (std::size_t k = text.find(what); k != std::string::npos; k = text.find(what, k + 1)) ++n;
    return n;
  };
  const std::string three = render_svg(f, {-1.0, 0.0, 1.0}, cs.points);
  CHECK(count(three, "<g class=\"level\"") == 3);
  CHECK(count(three, "<circle class=\"critical\"") == 4);
  CHECK(count(three, "class=\"boundary") == 2);
  CHECK(three == render_svg(f, {-1.0, 0.0, 1.0}, cs.points));

  const std::string bare = render_svg(f, {}, {});
  CHECK(count(bare, "<g class=\"level\"") == 0);
  CHECK(count(bare, "class=\"boundary") == 2);

  const std::string above = render_svg(f, {f.max_value() + 1.0}, {});
  CHECK(count(above, "<g class=\"level\"") == 1);
  CHECK(count(above, "<polyline") == 0);
}
