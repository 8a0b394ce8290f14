#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <tuple>

#include "doctest.h"
#include "lslab/scenario_io.hpp"
#include "lslab/topology.hpp"
#include "support/census_oracle.hpp"

using namespace lslab;

namespace {

constexpr double kPi = std::numbers::pi;

ScenarioSpec builtin(const std::string& name) {
  return load_scenario(std::string(LSLAB_SOURCE_DIR) + "/scenarios/" + name + ".json");
}

ScenarioSpec extra(const std::string& name) {
  return load_scenario(std::string(LSLAB_SOURCE_DIR) + "/tests/scenarios/" + name + ".json");
}

using oracle::Signature;
using oracle::signatures;

const LevelComponent* only(const LevelSetCensus& c, LevelSign sign) {
  const LevelComponent* found = nullptr;
  for (const auto& k : c.components)
    if (!k.uncertain && k.sign == sign) found = &k;
  return found;
}

double distance_to_lines(const LevelLines& lines, Point p) {
  double best = 1e300;
  for (const auto& l : lines.lines)
    for (const auto& q : l.points) best = std::min(best, std::hypot(q.x - p.x, q.y - p.y));
  return best;
}

}  // namespace

TEST_CASE("census of log r at t = 0.5") {
  const SolutionField f = solve_scenario(builtin("log_annulus"));
  const LevelSetCensus c = level_census(f, 0.5);
  CHECK(c.M1 == 1);
  CHECK(c.M2 == 1);
  const LevelComponent* sup = only(c, LevelSign::Super);
  const LevelComponent* sub = only(c, LevelSign::Sub);
  REQUIRE(sup);
  REQUIRE(sub);
  CHECK(sup->touches_exterior);
  CHECK_FALSE(sup->touches_interior);
  CHECK(sub->touches_interior);
  CHECK_FALSE(sub->touches_exterior);
  CHECK(sup->encircles_hole);
  CHECK(sub->encircles_hole);
}

TEST_CASE("census of Re(z + 1/z) above the saddle value") {
  // r + 1/r >= 2 with equality at r = 1, so near theta = 0 the set {u > 2.2}
  // splits into a piece at each boundary.
  const SolutionField f = solve_scenario(builtin("z_plus_inv"));
  const LevelSetCensus c = level_census(f, 2.2);
  CHECK(c.M1 == 2);
  CHECK(c.M2 == 1);
  CHECK(c.count(LevelSign::Super, true, true, false) == 1);
  CHECK(c.count(LevelSign::Super, true, false, true) == 1);
}

TEST_CASE("census above the maximum and below the minimum") {
  const SolutionField f = solve_scenario(builtin("z2_minus_zm2"));
  const LevelSetCensus hi = level_census(f, f.max_value() + 1.0);
  CHECK(hi.M1 == 0);
  CHECK(hi.M2 == 1);
  const LevelSetCensus lo = level_census(f, f.min_value() - 1.0);
  CHECK(lo.M1 == 1);
  CHECK(lo.M2 == 0);
}

TEST_CASE("census agrees with a brute-force flood fill on closed-form samples") {
  const GridSize g{64, 32};
  std::mt19937 rng(20261017);
  int agree = 0, total = 0;
  for (const char* name : {"log_annulus", "z_plus_inv", "z2_minus_zm2"}) {
    const ScenarioSpec s = builtin(name);
    REQUIRE(s.reference);
    const SolutionField f = sample_field(s, *s.reference, g);
    std::uniform_real_distribution<double> pick(f.min_value() + 0.02 * f.oscillation(),
                                                f.max_value() - 0.02 * f.oscillation());
    for (int k = 0; k < 20; ++k) {
      const double t = pick(rng);
      const LevelSetCensus c = level_census(f, t);
      const auto expected =
          oracle::brute_force_census(s.domain, [&](Point p) { return s.reference->evaluate(p); }, g, 2, t);
      const int m1 = static_cast<int>(std::count_if(expected.begin(), expected.end(),
                                                    [](const Signature& x) { return std::get<0>(x) == 1; }));
      const int m2 = static_cast<int>(expected.size()) - m1;
      const bool ok = c.M1 == m1 && c.M2 == m2 && signatures(c) == expected;
      CHECK_MESSAGE(ok, name << " t=" << t);
      agree += ok;
      ++total;
    }
  }
  CHECK(agree == total);
  CHECK(total == 60);
}

TEST_CASE("counts do not change across an interval without critical values") {
  const SolutionField f = solve_scenario(builtin("z_plus_inv"));
  for (auto range : {std::pair{-1.5, 1.5}, std::pair{2.1, 2.4}, std::pair{-2.4, -2.1}}) {
    const LevelSetCensus first = level_census(f, range.first);
    for (int k = 1; k <= 6; ++k) {
      const double t = range.first + (range.second - range.first) * k / 6;
      const LevelSetCensus c = level_census(f, t);
      CHECK_MESSAGE(c.M1 == first.M1, t);
      CHECK_MESSAGE(c.M2 == first.M2, t);
    }
  }
}

TEST_CASE("super components reach their maximum on boundary contact cells") {
  for (const char* name : {"z_plus_inv", "z2_minus_zm2", "band_annulus"}) {
    const SolutionField f = solve_scenario(builtin(name));
    for (double frac : {0.2, 0.5, 0.8}) {
      const double t = f.min_value() + frac * f.oscillation();
      const LevelSetCensus c = level_census(f, t);
      for (const auto& k : c.components) {
        if (k.uncertain || k.sign != LevelSign::Super) continue;
        REQUIRE((k.touches_interior || k.touches_exterior));
        CHECK(k.extremal_value <= k.contact_extremal_value + 1e-3 * f.oscillation());
      }
    }
  }
}

TEST_CASE("level line of log r is the circle r = exp(0.5)") {
  const SolutionField f = solve_scenario(builtin("log_annulus"), {256, 128});
  const LevelLines lines = trace_level_lines(f, 0.5);
  REQUIRE(lines.lines.size() == 1);
  CHECK(lines.lines[0].closed);
  double dev = 0;
  for (const auto& p : lines.lines[0].points) dev = std::max(dev, std::fabs(std::hypot(p.x, p.y) - std::exp(0.5)));
  CHECK(dev <= 1e-2);
}

TEST_CASE("zero lines of Re(z^2 - z^-2)") {
  const SolutionField f = solve_scenario(builtin("z2_minus_zm2"), {256, 128});
  const LevelLines lines = trace_level_lines(f, 0.0);
  REQUIRE_FALSE(lines.lines.empty());
  // Every vertex lies on r = 1 or on a diagonal ray.
  for (const auto& l : lines.lines)
    for (const auto& p : l.points) {
      const double r = std::hypot(p.x, p.y);
      const double th = std::atan2(p.y, p.x);
      const double ray = r * std::fabs(std::cos(2 * th)) / 2;
      CHECK(std::min(std::fabs(r - 1), ray) < 2e-2);
    }
  // And the zero set is covered.
  for (int k = 0; k < 64; ++k) {
    const double a = 2 * kPi * k / 64;
    CHECK(distance_to_lines(lines, {std::cos(a), std::sin(a)}) < 3e-2);
  }
  for (int k = 0; k < 4; ++k)
    for (double r : {0.6, 0.8, 1.3, 1.7}) {
      const double a = kPi / 4 + k * kPi / 2;
      CHECK(distance_to_lines(lines, {r * std::cos(a), r * std::sin(a)}) < 3e-2);
    }
}

TEST_CASE("no level lines above the maximum") {
  const SolutionField f = solve_scenario(builtin("z_plus_inv"));
  CHECK(trace_level_lines(f, f.max_value() + 0.1).lines.empty());
}

TEST_CASE("trace profiles of simple periodic data") {
  const TraceProfile a = trace_profile([](double t) { return 2.5 * std::cos(t); }, 4096, 1e-6, 1e-9);
  CHECK(a.N() == 1);
  CHECK(a.minima.size() == 1);
  CHECK(a.sign_changes == 2);
  CHECK(a.tangential_zeros == 0);
  CHECK(a.equal_maxima);
  CHECK(a.max == doctest::Approx(2.5));
  CHECK(a.min == doctest::Approx(-2.5));

  const TraceProfile b = trace_profile([](double t) { return 3.75 * std::cos(2 * t); }, 4096, 1e-6, 1e-9);
  CHECK(b.N() == 2);
  CHECK(b.minima.size() == 2);
  CHECK(b.sign_changes == 4);
  CHECK(b.equal_maxima);
  CHECK(b.equal_minima);

  const TraceProfile touch = trace_profile([](double t) { return 1 + std::sin(3 * t); }, 4096, 1e-6, 1e-9);
  CHECK(touch.sign_changes == 0);
  CHECK(touch.tangential_zeros == 3);
  CHECK_FALSE(touch.sign_changing());

  const TraceProfile flat = trace_profile([](double) { return 0.3; }, 4096, 1e-6, 1e-9);
  CHECK(flat.degenerate);
  CHECK_THROWS_AS(require_nondegenerate(flat, "interior"), DegenerateTrace);
}

TEST_CASE("boundary profiles of the counterexample geometries") {
  // log r on r_I = 2 + sin 3theta, r_E = 6 + sin 4theta and on
  // r_I = 3 + sin 3theta, r_E = 4 + sin 3theta.
  for (auto [name, n_ext] : {std::pair{"counterexample1", 4}, std::pair{"counterexample2", 3}}) {
    const ScenarioSpec s = builtin(name);
    const SolutionField f = solve_scenario(s);
    const BoundaryProfile p = boundary_profile(s, f);
    REQUIRE(p.interior);
    CHECK_MESSAGE(p.interior->N() == 3, name);
    CHECK(p.interior->equal_maxima);
    CHECK(p.exterior.N() == n_ext);
    CHECK(static_cast<int>(p.exterior.minima.size()) == n_ext);
    CHECK(p.exterior.equal_maxima);
    CHECK(p.exterior.equal_minima);
    for (const auto& e : p.interior->maxima) CHECK_FALSE(e.relative_to_closure);
    for (const auto& e : p.exterior.minima) CHECK_FALSE(e.relative_to_closure);
    for (const auto& e : p.exterior.maxima) CHECK(e.relative_to_closure);
    for (const auto& e : p.interior->minima) CHECK(e.relative_to_closure);
  }
}

TEST_CASE("boundary profile of Re(z^2 - z^-2)") {
  const ScenarioSpec s = builtin("z2_minus_zm2");
  const BoundaryProfile p = boundary_profile(s, solve_scenario(s));
  REQUIRE(p.interior);
  CHECK(p.interior->N() == 2);
  CHECK(p.interior->sign_changes == 4);
  CHECK(p.exterior.N() == 2);
  CHECK(p.exterior.sign_changes == 4);
  CHECK(p.exterior.max == doctest::Approx(3.75).epsilon(1e-6));
  CHECK(ordering_case(p, 1e-9) == OrderingCase::Other);
}

TEST_CASE("ordering of boundary ranges") {
  const ScenarioSpec s = builtin("band_annulus");
  const BoundaryProfile p = boundary_profile(s, solve_scenario(s));
  CHECK(ordering_case(p, 1e-9) == OrderingCase::Separated);
  const ScenarioSpec c2 = builtin("counterexample2");
  CHECK(ordering_case(boundary_profile(c2, solve_scenario(c2)), 1e-9) == OrderingCase::Overlapping);
}

TEST_CASE("component contact on the first counterexample") {
  const ScenarioSpec s = builtin("counterexample1");
  const SolutionField f = solve_scenario(s);
  const BoundaryProfile p = boundary_profile(s, f);
  // log 6 lies in (z2, Z2) = (log 5, log 7), log 1.5 in (z1, Z1) = (0, log 3).
  for (double t : {std::log(6.0), std::log(1.5)}) {
    const ContactReport r = check_component_contact(level_census(f, t), p, 1e-6);
    CHECK(r.applicable);
    CHECK_FALSE(r.checks.empty());
    CHECK_MESSAGE(r.holds(), t);
  }
  // log 4 falls between the two boundary ranges, where no clause applies.
  const ContactReport gap = check_component_contact(level_census(f, std::log(4.0)), p, 1e-6);
  CHECK_FALSE(gap.applicable);
  CHECK(gap.reason.find("no contact clause") != std::string::npos);
}

TEST_CASE("component contact is not applicable when the ranges coincide") {
  const ScenarioSpec s = builtin("z_plus_inv");
  const SolutionField f = solve_scenario(s);
  const ContactReport r = check_component_contact(level_census(f, 2.2), boundary_profile(s, f), 1e-6);
  CHECK_FALSE(r.applicable);
  CHECK(r.reason.find("ordering case fails") != std::string::npos);
}

TEST_CASE("component contact flags a super component touching neither boundary") {
  BoundaryProfile p;
  p.interior = TraceProfile{};
  p.interior->min = 0;
  p.interior->max = 1;
  p.exterior.min = 2;
  p.exterior.max = 3;
  LevelSetCensus c;
  c.t = 2.5;
  LevelComponent floating;
  floating.sign = LevelSign::Super;
  floating.cells = {0};
  c.components.push_back(floating);
  c.M1 = 1;
  const ContactReport r = check_component_contact(c, p, 1e-9);
  REQUIRE(r.applicable);
  CHECK_FALSE(r.holds());
  c.components[0].touches_exterior = true;
  CHECK(check_component_contact(c, p, 1e-9).holds());
}

TEST_CASE("local structure around critical and regular points") {
  const SolutionField f = solve_scenario(builtin("z_plus_inv"));
  const LocalStructure saddle = local_structure(f, {1.0, 0.0}, 0.2);
  CHECK(saddle.supers == 2);
  CHECK(saddle.subs == 2);
  const LocalStructure regular = local_structure(f, {0.0, 1.2}, 0.2);
  CHECK(regular.supers == 1);
  CHECK(regular.subs == 1);
  CHECK_THROWS_AS(local_structure(f, {1.0, 0.0}, 0.2, {{1.1, 0.0}}), RadiusExhausted);

  const SolutionField z3 = solve_scenario(builtin("disk_z3"));
  const LocalStructure monkey = local_structure(z3, {0.0, 0.0}, 0.3);
  CHECK(monkey.supers == 3);
  CHECK(monkey.subs == 3);
}

TEST_CASE("local structure at detected points matches the multiplicity") {
  for (const char* name : {"z_plus_inv", "z2_minus_zm2", "disk_z2", "disk_z3"}) {
    const SolutionField f = solve_scenario(builtin(name));
    const CriticalSearch cs = find_critical_points(f, resolve_tolerances(f));
    REQUIRE_FALSE(cs.points.empty());
    for (const auto& p : cs.points) {
      std::vector<Point> others;
      for (const auto& o : cs.points)
        if (&o != &p) others.push_back(o.location);
      const LocalStructure ls = local_structure(f, p, others);
      CHECK_MESSAGE(ls.supers == p.multiplicity + 1, name);
      CHECK_MESSAGE(ls.subs == p.multiplicity + 1, name);
    }
  }
}

TEST_CASE("cluster count of critical points on one level") {
  // The four zero points of Re(z^2 - z^-2) all sit on the circle r = 1.
  const SolutionField z2 = solve_scenario(builtin("z2_minus_zm2"));
  std::vector<Point> zeros;
  for (int k = 0; k < 4; ++k) zeros.push_back({std::cos(kPi / 4 + k * kPi / 2), std::sin(kPi / 4 + k * kPi / 2)});
  CHECK(cluster_critical_sets(z2, zeros, 0.0) == 1);

  const SolutionField zp = solve_scenario(builtin("z_plus_inv"));
  CHECK(cluster_critical_sets(zp, {{1.0, 0.0}}, 2.0) == 1);
}

TEST_CASE("two isolated minima of equal value form two clusters") {
  ScenarioSpec s = builtin("z_plus_inv");
  const ScalarExpr well = parse_expression("(x^2 - 1)^2 + y^2");
  const SolutionField f = sample_field(s, well, {128, 64});
  CHECK(cluster_critical_sets(f, {{1.0, 0.0}, {-1.0, 0.0}}, 0.0) == 2);
  // A single point is a single cluster.
  CHECK(cluster_critical_sets(f, {{1.0, 0.0}}, 0.0) == 1);
}

TEST_CASE("supplementary ring scenarios") {
  struct Case {
    const char* name;
    int points, q, m1, m2;
  };
  for (const Case& k : {Case{"saddle_ring2", 2, 1, 2, 3}, Case{"saddle_ring3", 3, 1, 3, 4},
                        Case{"pocket_saddle", 1, 1, 2, 2}}) {
    const SolutionField f = solve_scenario(extra(k.name));
    const CriticalSearch cs = find_critical_points(f, resolve_tolerances(f));
    REQUIRE_MESSAGE(static_cast<int>(cs.points.size()) == k.points, k.name);
    std::vector<Point> at;
    for (const auto& p : cs.points) at.push_back(p.location);
    const double t = cs.points[0].value;
    CHECK_MESSAGE(cluster_critical_sets(f, at, t) == k.q, k.name);
    const LevelSetCensus c = level_census(f, t, 2, at);
    CHECK_MESSAGE(c.M1 == k.m1, k.name);
    CHECK_MESSAGE(c.M2 == k.m2, k.name);
  }
}
