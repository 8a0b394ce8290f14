// Acceptance run: one PASS/FAIL line per criterion. Closed forms used as
// oracles are written out here rather than read from the scenario files.

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "lslab/report.hpp"
#include "lslab/scenario_io.hpp"
#include "support/census_oracle.hpp"

using namespace lslab;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a failed expectation; returns `ok` so calls can be chained.
  bool expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
    return ok;
  }
};

ScenarioSpec builtin(const std::string& name) {
  return load_scenario(std::string(LSLAB_SOURCE_DIR) + "/scenarios/" + name + ".json");
}

ScenarioSpec extra(const std::string& name) {
  return load_scenario(std::string(LSLAB_SOURCE_DIR) + "/tests/scenarios/" + name + ".json");
}

double radius(Point p) { return std::hypot(p.x, p.y); }
double angle(Point p) { return std::atan2(p.y, p.x); }

// Closed forms, keyed by scenario.
const std::map<std::string, std::function<double(Point)>> kExact = {
    {"log_annulus", [](Point p) { return std::log(radius(p)); }},
    {"z_plus_inv", [](Point p) { return (radius(p) + 1 / radius(p)) * std::cos(angle(p)); }},
    {"z2_minus_zm2",
     [](Point p) { return (std::pow(radius(p), 2) - std::pow(radius(p), -2)) * std::cos(2 * angle(p)); }},
};

bool near_any(Point p, const std::vector<Point>& targets, double tol) {
  for (const auto& q : targets)
    if (std::hypot(p.x - q.x, p.y - q.y) <= tol) return true;
  return false;
}

int total_multiplicity(const std::vector<CriticalPoint>& pts) {
  int m = 0;
  for (const auto& p : pts) m += p.multiplicity;
  return m;
}

void expect_verdict(Outcome& o, const VerificationReport& rep, const std::string& id, long lhs, long rhs) {
  const TheoremVerdict* v = rep.verdict(id);
  if (!o.expect(v && v->applicable, rep.name + " " + id + " applicable")) return;
  o.expect(v->holds && *v->holds, rep.name + " " + id + " holds");
  o.expect(v->lhs == lhs && v->rhs == rhs, rep.name + " " + id + " " + std::to_string(v->lhs.value_or(-1)) + " vs " +
                                               std::to_string(v->rhs.value_or(-1)));
  o.detail << id << " " << v->lhs.value_or(-1) << " " << v->relation << " " << v->rhs.value_or(-1) << "; ";
}

void criterion_1(Outcome& o) {
  for (const char* name : {"counterexample1", "counterexample2"}) {
    const ScenarioSpec s = builtin(name);
    for (GridSize g : {GridSize{128, 64}, GridSize{256, 128}}) {
      const SolutionField f = solve_scenario(s, g);
      const CriticalSearch cs = find_critical_points(f, resolve_tolerances(f));
      o.expect(cs.points.empty(), std::string(name) + " has " + std::to_string(cs.points.size()) + " points on " +
                                      std::to_string(g.n_theta) + "x" + std::to_string(g.n_s));
    }
    const SolutionField f = solve_scenario(s);
    const BoundaryProfile p = boundary_profile(s, f);
    const int n_in = 3, n_ex = std::string(name) == "counterexample1" ? 4 : 3;
    const TraceProfile& in = *p.interior;
    const TraceProfile& ex = p.exterior;
    o.expect(in.N() == n_in && in.equal_maxima, std::string(name) + " interior maxima");
    o.expect(static_cast<int>(ex.minima.size()) == n_ex && ex.N() == n_ex && ex.equal_minima && ex.equal_maxima,
             std::string(name) + " exterior extrema");
    for (const auto& e : in.maxima) o.expect(!e.relative_to_closure, std::string(name) + " interior max marked relative to the closure");
    for (const auto& e : ex.minima) o.expect(!e.relative_to_closure, std::string(name) + " exterior min marked relative to the closure");
    // r_E = R2 + sin(k theta) has minimum radius R2 - 1.
    const double r2 = std::string(name) == "counterexample1" ? 6 : 4;
    o.expect(std::abs(ex.min - std::log(r2 - 1)) < 1e-6, std::string(name) + " z2 = log(R2 - 1)");
    o.detail << name << ": 0 points on both grids, gamma_I " << in.N() << " equal maxima, gamma_E " << ex.N()
             << " equal maxima / " << ex.minima.size() << " equal minima; ";
  }
}

void criterion_2(Outcome& o) {
  const VerificationReport rep = run_scenario(builtin("z_plus_inv"));
  o.expect(rep.points.size() == 2, "two points");
  for (const auto& p : rep.points) {
    o.expect(near_any(p.location, {{1, 0}, {-1, 0}}, 1e-3), "location (+-1, 0)");
    o.expect(p.multiplicity == 1, "multiplicity 1");
    o.expect(std::abs(std::abs(p.value) - 2) < 1e-3 && p.value * p.location.x > 0, "value +-2");
  }
  o.expect(rep.profile.interior->N() + rep.profile.exterior.N() == 2, "N1 + N2 = 2");
  expect_verdict(o, rep, "thm_1_1", 2, 2);
}

void criterion_3(Outcome& o) {
  const VerificationReport rep = run_scenario(builtin("z2_minus_zm2"));
  std::vector<Point> roots;
  for (int k = 0; k < 4; ++k) roots.push_back({std::cos(kPi / 4 + k * kPi / 2), std::sin(kPi / 4 + k * kPi / 2)});
  int zeros = 0;
  for (const auto& p : rep.points) {
    zeros += p.is_zero;
    o.expect(near_any(p.location, roots, 1e-3), "location e^{i(pi/4 + k pi/2)}");
  }
  o.expect(rep.points.size() == 4 && zeros == 4, "four critical zero points");
  o.expect(total_multiplicity(rep.points) == 4, "sum m = 4");
  o.expect(rep.profile.interior->sign_changes == 4 && rep.profile.exterior.sign_changes == 4, "N~1 = N~2 = 4");
  expect_verdict(o, rep, "thm_1_4", 4, 4);
}

void criterion_4(Outcome& o) {
  for (auto [name, m, sign_changes] : {std::tuple{"disk_z2", 1, 4}, std::tuple{"disk_z3", 2, 6}}) {
    const VerificationReport rep = run_scenario(builtin(name));
    if (!o.expect(rep.points.size() == 1, std::string(name) + " one point")) continue;
    const CriticalPoint& p = rep.points.front();
    o.expect(radius(p.location) < 1e-3, std::string(name) + " at the origin");
    o.expect(p.multiplicity == m, std::string(name) + " multiplicity");
    o.expect(std::abs(p.winding + m) <= 0.05, std::string(name) + " winding " + std::to_string(p.winding));
    o.expect(rep.profile.exterior.sign_changes == sign_changes, std::string(name) + " N~");
    o.detail << name << " winding " << p.winding << ", ";
    expect_verdict(o, rep, "rem_5_1", m, m);
  }
}

void criterion_5(Outcome& o) {
  for (const char* name : {"z_plus_inv", "z2_minus_zm2", "disk_z2", "disk_z3"}) {
    const ScenarioSpec s = builtin(name);
    const VerificationReport rep = run_scenario(s);
    const SolutionField f = solve_scenario(s, rep.fine.grid);
    for (const auto& p : rep.points) {
      std::vector<Point> others;
      for (const auto& q : rep.points)
        if (&q != &p) others.push_back(q.location);
      const LocalStructure ls = local_structure(f, p, others);
      o.expect(ls.supers == p.multiplicity + 1 && ls.subs == p.multiplicity + 1,
               std::string(name) + " local structure " + std::to_string(ls.supers) + "/" + std::to_string(ls.subs));
    }
    o.detail << name << " " << rep.points.size() << " point(s); ";
  }
}

// Min over a dense polar grid of the radial derivative of the band_annulus
// closed form.
double band_min_radial_derivative() {
  const double c = 5 / std::log(2.0);
  double best = 1e300;
  for (int a = 0; a < 720; ++a)
    for (int b = 0; b <= 200; ++b) {
      const double th = 2 * kPi * a / 720, r = 1 + b / 200.0;
      const double ur = c / r + (4.0 / 15) * (2 * r + 2 / (r * r * r)) * std::cos(2 * th) +
                        (-2 / (15 * r * r) - 1.0 / 30) * std::sin(th);
      best = std::min(best, ur);
    }
  return best;
}

void criterion_6(Outcome& o) {
  const VerificationReport rep = run_scenario(builtin("band_annulus"));
  const double z2 = rep.profile.exterior.min, Z2 = rep.profile.exterior.max;
  int in_band = 0;
  for (const auto& p : rep.points) in_band += p.value > z2 && p.value < Z2;
  const double ur = band_min_radial_derivative();
  o.detail << "band_annulus: " << rep.points.size() << " critical point(s), " << in_band
           << " critical value(s) in (z2, Z2); closed form has min u_r = " << ur << " > 0, so none exist; ";
  if (in_band == 0) {
    o.expect(false, "identity is vacuous on band_annulus, no critical value to test");
  } else {
    const TheoremVerdict* v = rep.verdict("lem_2_5");
    o.expect(v && v->applicable && v->holds && *v->holds, "lem_2_5 identity");
  }
  // Non-vacuous evidence from a scenario with a saddle in (z2, Z2).
  const VerificationReport pocket = run_scenario(extra("pocket_saddle"));
  const TheoremVerdict* pv = pocket.verdict("lem_2_5");
  for (const auto& c : pv->checks)
    if (c.clause.find("M1 + M2 = 2 sum m + q + 1") != std::string::npos)
      o.detail << "supplementary pocket_saddle at t = " << c.t << ": " << c.lhs << " == " << c.rhs
               << (c.holds ? " holds" : " FAILS") << "; ";
}

void criterion_7(Outcome& o) {
  const VerificationReport rep = run_scenario(builtin("band_annulus"));
  // Traces 0.1 sin(theta) and 5 + cos(2 theta): Z1 = 0.1, z2 = 4.
  const double delta = rep.tol.equal_extrema_tol * rep.tol.scale;
  for (const auto& p : rep.points)
    o.expect(p.value < 0.1 + delta || p.value > 4 - delta, "critical value inside [Z1 + delta, z2 - delta]");
  o.expect(std::abs(rep.profile.interior->max - 0.1) < 1e-9 && std::abs(rep.profile.exterior.min - 4) < 1e-9,
           "boundary ranges Z1 = 0.1, z2 = 4");
  expect_verdict(o, rep, "lem_2_4", 0, 0);
  o.detail << "points " << rep.points.size() << ", min u_r of the closed form " << band_min_radial_derivative();
}

void criterion_8(Outcome& o) {
  for (const char* name : {"log_annulus", "z_plus_inv"}) {
    const ScenarioSpec s = builtin(name);
    const auto& exact = kExact.at(name);
    double prev = 0;
    o.detail << name << ":";
    for (GridSize g : {GridSize{64, 32}, GridSize{128, 64}, GridSize{256, 128}}) {
      const SolutionField f = solve_scenario(s, g);
      double err = 0;
      for (int j = 0; j <= g.n_s; ++j)
        for (int i = 0; i < g.n_theta; ++i) err = std::max(err, std::abs(f.node(i, j) - exact(f.node_point(i, j))));
      o.detail << " " << g.n_theta << " e=" << err;
      if (prev > 0) {
        const double order = std::log2(prev / err);
        o.detail << " p=" << order;
        o.expect(std::abs(order - 2) <= 0.3, std::string(name) + " order");
      }
      prev = err;
    }
    o.expect(prev <= 5e-3, std::string(name) + " final error");
    o.detail << "; ";
  }
}

void criterion_9(Outcome& o) {
  const GridSize g{64, 32};
  std::mt19937 rng(20261017);
  int agree = 0, total = 0;
  for (const char* name : {"log_annulus", "z_plus_inv", "z2_minus_zm2"}) {
    const ScenarioSpec s = builtin(name);
    const SolutionField f = sample_field(s, *s.reference, g);
    std::uniform_real_distribution<double> pick(f.min_value() + 0.02 * f.oscillation(),
                                                f.max_value() - 0.02 * f.oscillation());
    for (int k = 0; k < 20; ++k) {
      const double t = pick(rng);
      const LevelSetCensus c = level_census(f, t);
      const auto expected = oracle::brute_force_census(s.domain, kExact.at(name), g, 2, t);
      const bool ok = c.M1 == oracle::count_sign(expected, 1) && c.M2 == oracle::count_sign(expected, -1) &&
                      oracle::signatures(c) == expected;
      o.expect(ok, std::string(name) + " t=" + std::to_string(t));
      agree += ok;
      ++total;
    }
  }
  o.expect(total == 60, "60 thresholds");
  o.detail << agree << "/" << total << " exact agreement";
}

void criterion_10(Outcome& o) {
  for (const char* name : {"band_annulus", "counterexample1", "counterexample2", "disk_z2", "disk_z3", "log_annulus",
                           "z2_minus_zm2", "z_plus_inv"}) {
    const ScenarioSpec s = builtin(name);
    const VerificationReport a = run_scenario(s);
    const VerificationReport b = run_scenario(s);
    o.expect(report_text(a, "T") == report_text(b, "T"), std::string(name) + " byte-identical reports");
    o.expect(a.coarse.points == a.fine.points && a.coarse.multiplicities == a.fine.multiplicities && a.stable,
             std::string(name) + " stable across grids");
    o.detail << name << " " << a.coarse.points << "/" << a.fine.points << ", ";
  }
  o.detail << "(points on 128x64 / 256x128)";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, void (*)(Outcome&)>> criteria = {
      {"counterexamples have no interior critical points", criterion_1},
      {"Re(z + 1/z): sum m = N1 + N2 = 2", criterion_2},
      {"Re(z^2 - z^-2): four critical zero points, 4 <= 4", criterion_3},
      {"disk Re(z^2), Re(z^3): 1 <= 1 and 2 <= 2", criterion_4},
      {"local structure (m+1, m+1) at every detected point", criterion_5},
      {"band_annulus: M1 + M2 = 2 sum m + q + 1 at critical values", criterion_6},
      {"band_annulus: no critical value in [Z1 + delta, z2 - delta]", criterion_7},
      {"second-order convergence on 64/128/256", criterion_8},
      {"census matches brute-force flood fill, 60 thresholds", criterion_9},
      {"deterministic reports, stable counts on the two finest grids", criterion_10},
  };
  // Criteria that cannot be met as stated; their FAIL does not fail the run.
  const std::set<int> known_red = {6};

  int unexpected = 0, passed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    Outcome o;
    try {
      criteria[k].second(o);
    } catch (const std::exception& e) {
      o.expect(false, std::string("exception: ") + e.what());
    }
    std::string detail = o.detail.str();
    std::printf("%s criterion %d: %s -- %s%s\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first.c_str(),
                detail.c_str(), !o.pass && known_red.count(id) ? " (known, recorded as unattainable)" : "");
    std::fflush(stdout);
    passed += o.pass;
    if (!o.pass && !known_red.count(id)) ++unexpected;
  }
  std::printf("%d/%zu criteria pass, %d unexpected failure(s)\n", passed, criteria.size(), unexpected);
  return unexpected ? 1 : 0;
}
