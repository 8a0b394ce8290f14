#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "lslab/render.hpp"
#include "lslab/report.hpp"
#include "lslab/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace lslab;
using nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kCheckFailed = 2;

struct Options {
  std::string scenario;
  std::string out = ".";
  std::string grid;
  std::vector<double> t;
  std::optional<double> tol_grad;
  int refine = 2;
  std::string format;
};

// Thrown for diagnostics that carry the stage the run stopped in.
struct StageError {
  std::string stage;
  std::string kind;
  std::string message;
};

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

GridSize parse_grid(const std::string& text) {
  int a = 0, b = 0;
  char x = 0, extra = 0;
  if (std::sscanf(text.c_str(), "%d%c%d%c", &a, &x, &b, &extra) != 3 || (x != 'x' && x != 'X') || a < 4 || b < 2)
    throw StageError{"arguments", "UsageError", "--grid expects NxM with N >= 4 and M >= 2, got '" + text + "'"};
  return {a, b};
}

// Runs fn, converting library errors into a StageError tagged with `stage`.
template <class F>
auto staged(const std::string& stage, F&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError{stage, e.kind(), one_line(e.what())};
  } catch (const std::exception& e) {
    throw StageError{stage, "Error", one_line(e.what())};
  }
}

ScenarioSpec load(const Options& o) {
  ScenarioSpec spec = staged("load", [&] { return load_scenario(o.scenario); });
  if (!o.grid.empty()) spec.grid = parse_grid(o.grid);
  if (o.tol_grad) spec.tol.grad_zero_tol = o.tol_grad;
  staged("validate", [&] { require_valid(spec); });
  return spec;
}

fs::path out_file(const Options& o, const std::string& name) {
  staged("write", [&] {
    std::error_code ec;
    fs::create_directories(o.out, ec);
    if (ec) throw IoError("cannot create output directory " + o.out + ": " + ec.message());
  });
  return fs::path(o.out) / name;
}

void write(const fs::path& path, const std::string& text) {
  staged("write", [&] { write_text_file(path.string(), text); });
}

std::string format_or(const Options& o, const std::string& fallback) { return o.format.empty() ? fallback : o.format; }

int cmd_solve(const Options& o) {
  const ScenarioSpec spec = load(o);
  const SolutionField field = staged("solve", [&] { return solve_scenario(spec); });
  if (format_or(o, "json") == "csv") {
    write(out_file(o, "solution.csv"), field_csv(field));
  } else {
    ordered_json j;
    j["scenario"] = spec.name;
    j["grid"] = {{"n_theta", spec.grid.n_theta}, {"n_s", spec.grid.n_s}};
    j["unknowns"] = field.layout().unknowns();
    j["relative_residual"] = sig12(field.residual());
    j["min"] = sig12(field.min_value());
    j["max"] = sig12(field.max_value());
    j["interpolation_error"] = sig12(field.interpolation_error());
    j["max_principle"] = satisfies_discrete_max_principle(field);
    if (spec.reference) {
      double err = 0;
      for (int j2 = 0; j2 <= field.layout().n_s(); ++j2)
        for (int i = 0; i < field.layout().n_theta(); ++i) {
          const Point p = field.node_point(i, j2);
          err = std::max(err, std::abs(field.node(i, j2) - spec.reference->evaluate(p)));
        }
      j["reference_linf_error"] = sig12(err);
    }
    write(out_file(o, "solution.json"), j.dump(2) + "\n");
  }
  std::printf("%s: solved %dx%d, u in [%.6g, %.6g]\n", spec.name.c_str(), spec.grid.n_theta, spec.grid.n_s,
              field.min_value(), field.max_value());
  return kOk;
}

int cmd_critical(const Options& o) {
  const ScenarioSpec spec = load(o);
  const SolutionField field = staged("solve", [&] { return solve_scenario(spec); });
  const ResolvedTolerances tol = resolve_tolerances(field);
  const CriticalSearch cs = staged("critical", [&] { return find_critical_points(field, tol); });
  if (format_or(o, "csv") == "json") {
    ordered_json a = ordered_json::array();
    for (const auto& p : cs.points)
      a.push_back({{"x", sig12(p.location.x)},
                   {"y", sig12(p.location.y)},
                   {"u", sig12(p.value)},
                   {"multiplicity", p.multiplicity},
                   {"is_zero", p.is_zero}});
    write(out_file(o, "critical.json"), a.dump(2) + "\n");
  } else {
    write(out_file(o, "critical.csv"), critical_csv(cs.points));
  }
  for (const auto& s : cs.suspects)
    std::fprintf(stderr, "%s: critical: warning: suspect near the boundary at (%.4f, %.4f)\n", o.scenario.c_str(),
                 s.location.x, s.location.y);
  std::printf("%s: %zu critical point(s), total multiplicity %d\n", spec.name.c_str(), cs.points.size(),
              cs.total_multiplicity());
  return kOk;
}

int cmd_census(const Options& o) {
  if (o.t.size() != 1) throw StageError{"arguments", "UsageError", "census needs exactly one --t"};
  const double t = o.t.front();
  const ScenarioSpec spec = load(o);
  const SolutionField field = staged("solve", [&] { return solve_scenario(spec); });
  const ResolvedTolerances tol = resolve_tolerances(field);
  const CriticalSearch cs = staged("critical", [&] { return find_critical_points(field, tol); });
  std::vector<Point> on_level;
  for (const auto& p : cs.points)
    if (std::abs(p.value - t) <= tol.equal_extrema_tol * tol.scale) on_level.push_back(p.location);
  const LevelSetCensus c = staged("census", [&] { return level_census(field, t, o.refine, on_level); });
  if (format_or(o, "json") == "csv") {
    std::ostringstream csv;
    csv << "sign,cells,touches_interior,touches_exterior,encircles_hole,uncertain\n";
    for (const auto& k : c.components)
      csv << (k.sign == LevelSign::Super ? "super" : "sub") << ',' << k.cells.size() << ',' << k.touches_interior
          << ',' << k.touches_exterior << ',' << k.encircles_hole << ',' << k.uncertain << '\n';
    write(out_file(o, "census.csv"), csv.str());
  } else {
    ordered_json j;
    j["scenario"] = spec.name;
    j.update(census_json(c));
    write(out_file(o, "census.json"), j.dump(2) + "\n");
  }
  for (const auto& w : c.warnings) std::fprintf(stderr, "%s: census: warning: %s\n", o.scenario.c_str(), w.c_str());
  std::printf("%s: t = %.6g, M1 = %d, M2 = %d\n", spec.name.c_str(), t, c.M1, c.M2);
  return kOk;
}

VerificationReport verify_report(const Options& o) {
  const ScenarioSpec spec = load(o);
  RunOptions ro;
  ro.refine = o.refine;
  return staged("verify", [&] { return run_scenario(spec, ro); });
}

int cmd_verify(const Options& o) {
  const VerificationReport rep = verify_report(o);
  write(out_file(o, "report.json"), report_text(rep, utc_timestamp()));
  int failed = 0, applicable = 0;
  for (const auto& v : rep.verdicts) {
    applicable += v.applicable;
    if (v.failed()) {
      ++failed;
      std::fprintf(stderr, "%s: verify: FAIL %s (%ld %s %ld)\n", o.scenario.c_str(), v.id.c_str(), v.lhs.value_or(0),
                   v.relation.c_str(), v.rhs.value_or(0));
    }
  }
  for (const auto& w : rep.warnings) std::fprintf(stderr, "%s: verify: warning: %s\n", o.scenario.c_str(), w.c_str());
  std::printf("%s: %zu critical point(s), %d applicable check(s), %d failed\n", rep.name.c_str(), rep.points.size(),
              applicable, failed);
  return failed ? kCheckFailed : kOk;
}

int cmd_render(const Options& o) {
  const ScenarioSpec spec = load(o);
  const SolutionField field = staged("solve", [&] { return solve_scenario(spec); });
  const ResolvedTolerances tol = resolve_tolerances(field);
  const CriticalSearch cs = staged("critical", [&] { return find_critical_points(field, tol); });
  std::vector<double> thresholds = o.t;
  if (thresholds.empty()) {
    // Default to the distinct critical values.
    for (const auto& p : cs.points)
      if (thresholds.empty() || std::abs(p.value - thresholds.back()) > tol.equal_extrema_tol * tol.scale)
        thresholds.push_back(p.value);
  }
  const std::string svg = staged("render", [&] { return render_svg(field, thresholds, cs.points, o.refine); });
  write(out_file(o, "levelsets.svg"), svg);
  std::printf("%s: %zu level group(s), %zu marker(s)\n", spec.name.c_str(), thresholds.size(), cs.points.size());
  return kOk;
}

struct BatchRow {
  std::string file;
  int exit = kOk;
  std::string name, error;
  int points = 0, multiplicity = 0, applicable = 0, failed = 0;
  bool stable = true;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

int batch_threads() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LEVELSET_LAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw StageError{"arguments", "UsageError", std::string("LEVELSET_LAB_THREADS must be a positive integer, got '") +
                                                      env + "'"};
    n = static_cast<int>(v);
  }
  return std::max(1, n);
}

int cmd_batch(const Options& o) {
  std::vector<fs::path> files;
  staged("load", [&] {
    std::error_code ec;
    for (fs::directory_iterator it(o.scenario, ec), end; !ec && it != end; it.increment(ec))
      if (it->path().extension() == ".json") files.push_back(it->path());
    if (ec) throw IoError("cannot list " + o.scenario + ": " + ec.message());
  });
  std::sort(files.begin(), files.end());
  if (files.empty()) throw StageError{"load", "IoError", "no scenario files (*.json) in " + o.scenario};

  std::vector<BatchRow> rows(files.size());
  std::atomic<std::size_t> next{0};
  std::mutex io;
  auto worker = [&] {
    for (std::size_t k; (k = next++) < files.size();) {
      BatchRow& row = rows[k];
      row.file = files[k].filename().string();
      Options one = o;
      one.scenario = files[k].string();
      one.out = (fs::path(o.out) / files[k].stem()).string();
      try {
        const VerificationReport rep = verify_report(one);
        write(out_file(one, "report.json"), report_text(rep, utc_timestamp()));
        row.name = rep.name;
        row.points = static_cast<int>(rep.points.size());
        for (const auto& p : rep.points) row.multiplicity += p.multiplicity;
        for (const auto& v : rep.verdicts) {
          row.applicable += v.applicable;
          row.failed += v.failed();
        }
        row.stable = rep.stable;
        row.exit = row.failed ? kCheckFailed : kOk;
      } catch (const StageError& e) {
        row.exit = kError;
        row.error = e.stage + ": " + e.kind + ": " + e.message;
        std::lock_guard lock(io);
        std::fprintf(stderr, "%s: %s\n", one.scenario.c_str(), row.error.c_str());
      }
    }
  };
  const int n = std::min<int>(batch_threads(), static_cast<int>(files.size()));
  std::vector<std::thread> pool;
  for (int k = 0; k < n; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::ostringstream csv;
  csv << "file,scenario,exit,critical_points,total_multiplicity,applicable_checks,failed_checks,stable,error\n";
  int worst = kOk;
  for (const auto& r : rows) {
    csv << csv_field(r.file) << ',' << csv_field(r.name) << ',' << r.exit << ',' << r.points << ',' << r.multiplicity
        << ',' << r.applicable << ',' << r.failed << ',' << (r.stable ? "true" : "false") << ','
        << csv_field(r.error) << '\n';
    if (r.exit == kError) worst = kError;
    else if (r.exit == kCheckFailed && worst == kOk) worst = kCheckFailed;
  }
  write(out_file(o, "summary.csv"), csv.str());
  std::printf("%zu scenario(s), summary in %s\n", rows.size(), (fs::path(o.out) / "summary.csv").c_str());
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Level sets and critical points of elliptic solutions on annuli and disks"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* cmd, const char* what) {
    cmd->add_option("scenario", o.scenario, what)->required();
    cmd->add_option("--out", o.out, "output directory")->capture_default_str();
    cmd->add_option("--grid", o.grid, "grid override, n_theta x n_s (e.g. 256x128)");
  };
  auto add_tol = [&](CLI::App* cmd) { cmd->add_option("--tol-grad", o.tol_grad, "gradient-norm tolerance"); };
  auto add_refine = [&](CLI::App* cmd) {
    cmd->add_option("--refine", o.refine, "census refinement factor")->check(CLI::Range(1, 16))->capture_default_str();
  };
  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  };

  CLI::App* solve = app.add_subcommand("solve", "solve and write solution.json (or solution.csv)");
  add_common(solve, "scenario file");
  add_format(solve);
  CLI::App* critical = app.add_subcommand("critical", "locate critical points, write critical.csv");
  add_common(critical, "scenario file");
  add_tol(critical);
  add_format(critical);
  CLI::App* census = app.add_subcommand("census", "level-set census at --t, write census.json");
  add_common(census, "scenario file");
  census->add_option("--t", o.t, "threshold")->required()->expected(1);
  add_tol(census);
  add_refine(census);
  add_format(census);
  CLI::App* verify = app.add_subcommand("verify", "run every check, write report.json");
  add_common(verify, "scenario file");
  add_tol(verify);
  add_refine(verify);
  CLI::App* render = app.add_subcommand("render", "draw level lines, write levelsets.svg");
  add_common(render, "scenario file");
  render->add_option("--t", o.t, "threshold (repeatable; default: the critical values)")->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  add_tol(render);
  add_refine(render);
  CLI::App* batch = app.add_subcommand("batch", "verify every *.json in a directory, write summary.csv");
  add_common(batch, "scenario directory");
  add_tol(batch);
  add_refine(batch);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kError;
  }

  try {
    if (!o.grid.empty()) parse_grid(o.grid);
    if (*solve) return cmd_solve(o);
    if (*critical) return cmd_critical(o);
    if (*census) return cmd_census(o);
    if (*verify) return cmd_verify(o);
    if (*render) return cmd_render(o);
    return cmd_batch(o);
  } catch (const StageError& e) {
    std::fprintf(stderr, "%s: %s: %s: %s\n", o.scenario.c_str(), e.stage.c_str(), e.kind.c_str(), e.message.c_str());
    return kError;
  }
}
