#include "lslab/report.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>

#include "lslab/scenario_io.hpp"

namespace lslab {

using nlohmann::ordered_json;

double sig12(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;  // no negative zero in reports
}

namespace {

ordered_json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return sig12(v);
}

ordered_json extrema_json(const std::vector<TraceExtremum>& es) {
  ordered_json a = ordered_json::array();
  for (const auto& e : es)
    a.push_back({{"theta", num(e.theta)}, {"value", num(e.value)}, {"relative_to_closure", e.relative_to_closure}});
  return a;
}

ordered_json trace_json(const TraceProfile& t) {
  ordered_json j;
  j["degenerate"] = t.degenerate;
  j["min"] = num(t.min);
  j["max"] = num(t.max);
  j["maxima_count"] = t.N();
  j["minima_count"] = static_cast<int>(t.minima.size());
  j["equal_maxima"] = t.equal_maxima;
  j["equal_minima"] = t.equal_minima;
  j["sign_changing"] = t.sign_changing();
  j["zero_count"] = t.sign_changes;
  j["tangential_zeros"] = t.tangential_zeros;
  j["maxima"] = extrema_json(t.maxima);
  j["minima"] = extrema_json(t.minima);
  ordered_json z = ordered_json::array();
  for (double a : t.zero_angles) z.push_back(num(a));
  j["zero_angles"] = z;
  return j;
}

ordered_json grid_run_json(const GridRun& g) {
  return {{"n_theta", g.grid.n_theta}, {"n_s", g.grid.n_s}, {"points", g.points}, {"multiplicities", g.multiplicities}};
}

}  // namespace

ordered_json profile_json(const BoundaryProfile& profile, double tol) {
  ordered_json j;
  j["interior"] = profile.interior ? trace_json(*profile.interior) : ordered_json(nullptr);
  j["exterior"] = trace_json(profile.exterior);
  j["ordering"] = profile.interior ? ordered_json(to_string(ordering_case(profile, tol))) : ordered_json(nullptr);
  return j;
}

ordered_json census_json(const LevelSetCensus& c) {
  ordered_json j;
  j["t"] = num(c.t);
  j["refine"] = c.refine;
  j["M1"] = c.M1;
  j["M2"] = c.M2;
  ordered_json comps = ordered_json::array();
  for (const auto& k : c.components)
    comps.push_back({{"sign", k.sign == LevelSign::Super ? "super" : "sub"},
                     {"cells", static_cast<int>(k.cells.size())},
                     {"touches_interior", k.touches_interior},
                     {"touches_exterior", k.touches_exterior},
                     {"encircles_hole", k.encircles_hole},
                     {"uncertain", k.uncertain},
                     {"extremal_value", num(k.extremal_value)},
                     {"contact_extremal_value", num(k.contact_extremal_value)}});
  j["components"] = comps;
  j["warnings"] = c.warnings;
  return j;
}

ordered_json verdict_json(const TheoremVerdict& v) {
  ordered_json j;
  j["id"] = v.id;
  j["holds"] = v.holds ? ordered_json(*v.holds) : ordered_json(nullptr);
  j["lhs"] = v.lhs ? ordered_json(*v.lhs) : ordered_json(nullptr);
  j["rhs"] = v.rhs ? ordered_json(*v.rhs) : ordered_json(nullptr);
  j["relation"] = v.relation;
  j["applicable"] = v.applicable;
  j["reason"] = v.reason;
  ordered_json hyps = ordered_json::array();
  for (const auto& h : v.hypotheses) hyps.push_back({{"name", h.name}, {"held", h.held}});
  j["hypotheses"] = hyps;
  ordered_json counts = ordered_json::object();
  for (const auto& [k, n] : v.witness_counts) counts[k] = n;
  j["witness"] = {{"points", v.witness_points}, {"counts", counts}};
  ordered_json checks = ordered_json::array();
  for (const auto& c : v.checks)
    checks.push_back({{"t", num(c.t)},
                      {"clause", c.clause},
                      {"relation", c.relation},
                      {"lhs", c.lhs},
                      {"rhs", c.rhs},
                      {"holds", c.holds}});
  j["checks"] = checks;
  return j;
}

ordered_json report_json(const VerificationReport& r, const std::string& timestamp) {
  ordered_json j;
  j["scenario"] = {{"name", r.name},
                   {"fingerprint", r.fingerprint},
                   {"domain", r.disk ? "disk" : "annulus"},
                   {"timestamp", timestamp},
                   {"tolerances",
                    {{"grad_zero_tol", num(r.tol.grad_zero_tol)},
                     {"value_zero_tol", num(r.tol.value_zero_tol)},
                     {"equal_extrema_tol", num(r.tol.equal_extrema_tol)},
                     {"interior_margin", num(r.tol.interior_margin)},
                     {"scale", num(r.tol.scale)}}}};
  j["grid"] = {{"coarse", grid_run_json(r.coarse)},
               {"fine", grid_run_json(r.fine)},
               {"stable", r.stable},
               {"census_refine", r.refine}};
  j["boundary_profile"] = profile_json(r.profile, r.tol.equal_extrema_tol * r.tol.scale);
  ordered_json pts = ordered_json::array();
  for (const auto& p : r.points)
    pts.push_back({{"x", num(p.location.x)},
                   {"y", num(p.location.y)},
                   {"u", num(p.value)},
                   {"multiplicity", p.multiplicity},
                   {"is_zero", p.is_zero},
                   {"degree_radius", num(p.degree_radius)},
                   {"winding", num(p.winding)}});
  j["critical_points"] = pts;
  ordered_json cs = ordered_json::array();
  for (const auto& rec : r.censuses) {
    ordered_json c;
    c["kind"] = rec.kind;
    c.update(census_json(rec.census));
    cs.push_back(c);
  }
  j["censuses"] = cs;
  ordered_json vs = ordered_json::array();
  for (const auto& v : r.verdicts) vs.push_back(verdict_json(v));
  j["verdicts"] = vs;
  j["warnings"] = r.warnings;
  j["notes"] = r.notes;
  return j;
}

std::string report_text(const VerificationReport& report, const std::string& timestamp) {
  return report_json(report, timestamp).dump(2) + "\n";
}

void emit_report(const VerificationReport& report, const std::string& path, const std::string& timestamp) {
  write_text_file(path, report_text(report, timestamp));
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace lslab
