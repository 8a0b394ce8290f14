#include <Eigen/SparseLU>
#include <cmath>
#include <limits>
#include <cstdio>
#include <map>
#include <numbers>

#include "lslab/solver.hpp"

namespace lslab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Coefficients {
  double a11, a12, a22, b1, b2, c;
};

Coefficients coefficients_at(const EllipticOperator& op, Point p) {
  const Bindings b = Bindings::at(p);
  Coefficients k{op.a11.evaluate(b), op.a12.evaluate(b), op.a22.evaluate(b),
                 op.b1.evaluate(b),  op.b2.evaluate(b),  op.c ? op.c->evaluate(b) : 0.0};
  for (double v : {k.a11, k.a12, k.a22, k.b1, k.b2, k.c})
    if (!std::isfinite(v))
      throw AssemblyError("non-finite operator coefficient at (" + std::to_string(p.x) + ", " +
                          std::to_string(p.y) + ")");
  return k;
}

double boundary_value(const ScenarioSpec& spec, double theta, bool interior) {
  return interior ? spec.psi_interior_at(theta) : spec.psi_exterior_at(theta);
}

using Row = std::map<int, double>;

void interior_row(const ScenarioSpec& spec, const GridLayout& g, int i, int j, Row& row) {
  const double ht = g.h_theta(), hs = g.h_s();
  const double th = g.theta(i), s = g.s(j);
  const Point p = spec.domain.map_reference(th, s).point;
  const InverseMetric m = spec.domain.inverse_metric(p);
  const Coefficients k = coefficients_at(spec.op, p);

  const double Att = k.a11 * m.tx * m.tx + 2 * k.a12 * m.tx * m.ty + k.a22 * m.ty * m.ty;
  const double Ass = k.a11 * m.sx * m.sx + 2 * k.a12 * m.sx * m.sy + k.a22 * m.sy * m.sy;
  const double Ats = 2 * (k.a11 * m.tx * m.sx + k.a12 * (m.tx * m.sy + m.ty * m.sx) + k.a22 * m.ty * m.sy);
  const double Bt = k.a11 * m.txx + 2 * k.a12 * m.txy + k.a22 * m.tyy + k.b1 * m.tx + k.b2 * m.ty;
  const double Bs = k.a11 * m.sxx + 2 * k.a12 * m.sxy + k.a22 * m.syy + k.b1 * m.sx + k.b2 * m.sy;
  for (double v : {Att, Ass, Ats, Bt, Bs})
    if (!std::isfinite(v))
      throw AssemblyError("non-finite metric term at theta=" + std::to_string(th) + ", s=" + std::to_string(s));

  auto add = [&](int ii, int jj, double w) { row[g.index(ii, jj)] += w; };
  add(i, j, -2 * Att / (ht * ht) - 2 * Ass / (hs * hs) + k.c);
  add(i + 1, j, Att / (ht * ht) + Bt / (2 * ht));
  add(i - 1, j, Att / (ht * ht) - Bt / (2 * ht));
  add(i, j + 1, Ass / (hs * hs) + Bs / (2 * hs));
  add(i, j - 1, Ass / (hs * hs) - Bs / (2 * hs));
  const double x = Ats / (4 * ht * hs);
  add(i + 1, j + 1, x);
  add(i - 1, j - 1, x);
  add(i + 1, j - 1, -x);
  add(i - 1, j + 1, -x);
}

// Center of a disk: second directional derivatives along the n/2 lines
// through opposite first-ring nodes, combined into u_xx, u_xy, u_yy by a
// Fourier fit in the line angle.
void center_row(const ScenarioSpec& spec, const GridLayout& g, Row& row) {
  const int n = g.n_theta();
  const Coefficients k = coefficients_at(spec.op, Point{0.0, 0.0});
  const double s1 = g.s(1);
  row[0] += k.c;
  for (int i = 0; i < n / 2; ++i) {
    const double th = g.theta(i);
    const double ra = s1 * spec.domain.outer_radius(th);
    const double rb = s1 * spec.domain.outer_radius(th + std::numbers::pi);
    const double qa = 2.0 / (ra * (ra + rb)), qb = 2.0 / (rb * (ra + rb));
    const double ga = rb / (ra * (ra + rb)), gb = ra / (rb * (ra + rb));
    const double wq = (2.0 / n) * (k.a11 + k.a22) + (4.0 / n) * (k.a11 - k.a22) * std::cos(2 * th) +
                      (8.0 / n) * k.a12 * std::sin(2 * th);
    const double wg = (4.0 / n) * (k.b1 * std::cos(th) + k.b2 * std::sin(th));
    const int ia = g.index(i, 1), ib = g.index(i + n / 2, 1);
    row[ia] += wq * qa + wg * ga;
    row[ib] += wq * qb - wg * gb;
    row[0] += -wq * (qa + qb) + wg * (gb - ga);
  }
}

}  // namespace

double GridLayout::h_theta() const { return kTwoPi / size_.n_theta; }

int GridLayout::unknowns() const {
  return disk_ ? 1 + size_.n_s * size_.n_theta : (size_.n_s + 1) * size_.n_theta;
}

int GridLayout::wrap(int i) const {
  const int n = size_.n_theta;
  return ((i % n) + n) % n;
}

int GridLayout::index(int i, int j) const {
  if (disk_) return j == 0 ? 0 : 1 + (j - 1) * size_.n_theta + wrap(i);
  return j * size_.n_theta + wrap(i);
}

DiscreteSystem assemble(const ScenarioSpec& spec) { return assemble(spec, spec.grid); }

DiscreteSystem assemble(const ScenarioSpec& spec, GridSize grid) {
  const bool disk = !spec.domain.is_annulus();
  GridLayout g(grid, disk);
  DiscreteSystem sys;
  sys.layout = g;
  const int n = g.unknowns();
  sys.rhs = Eigen::VectorXd::Zero(n);
  sys.dirichlet.assign(n, 0);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n) * 9);
  auto dirichlet = [&](int idx, double value) {
    triplets.emplace_back(idx, idx, 1.0);
    sys.rhs[idx] = value;
    sys.dirichlet[idx] = 1;
  };

  Row row;
  if (disk) {
    center_row(spec, g, row);
    for (const auto& [col, w] : row) triplets.emplace_back(0, col, w);
  }
  for (int j = disk ? 1 : 0; j <= grid.n_s; ++j) {
    for (int i = 0; i < grid.n_theta; ++i) {
      const int idx = g.index(i, j);
      if (j == 0) {
        dirichlet(idx, boundary_value(spec, g.theta(i), true));
      } else if (j == grid.n_s) {
        dirichlet(idx, boundary_value(spec, g.theta(i), false));
      } else {
        row.clear();
        interior_row(spec, g, i, j, row);
        for (const auto& [col, w] : row) triplets.emplace_back(idx, col, w);
      }
    }
  }
  for (double v : sys.rhs)
    if (!std::isfinite(v)) throw AssemblyError("non-finite boundary value");
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.matrix.makeCompressed();
  return sys;
}

bool is_m_matrix(const DiscreteSystem& system) {
  const auto& A = system.matrix;
  for (int r = 0; r < A.rows(); ++r) {
    if (system.dirichlet[r]) continue;
    double diag = 0.0, sum = 0.0, min_off = 0.0;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(A, r); it; ++it) {
      sum += it.value();
      if (it.col() == r) diag = it.value();
      else min_off = std::min(min_off, it.value());
    }
    if (!(diag < 0.0)) return false;
    if (min_off < -1e-12 * std::fabs(diag) || std::fabs(sum) > 1e-10 * std::fabs(diag)) return false;
  }
  return true;
}

SolutionField solve(std::shared_ptr<const ScenarioSpec> spec, const DiscreteSystem& system, double tol) {
  Eigen::SparseMatrix<double> A = system.matrix;  // column-major for SparseLU
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success)
    throw NoConvergence(0, INFINITY, "sparse LU factorisation failed: " + lu.lastErrorMessage());

  // Normwise backward error |r|_inf / (|A|_inf |x|_inf + |b|_inf).
  double a_norm = 0;
  for (int i = 0; i < system.matrix.outerSize(); ++i) {
    double row = 0;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(system.matrix, i); it; ++it)
      row += std::fabs(it.value());
    a_norm = std::max(a_norm, row);
  }
  const double b_norm = system.rhs.lpNorm<Eigen::Infinity>();
  auto backward_error = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& r) {
    const double denom = a_norm * x.lpNorm<Eigen::Infinity>() + b_norm;
    return denom > 0 ? r.lpNorm<Eigen::Infinity>() / denom : 0.0;
  };
  Eigen::VectorXd x = lu.solve(system.rhs);
  Eigen::VectorXd r = system.rhs - A * x;
  double rel = backward_error(x, r);
  int iterations = 1;
  // A few sweeps of iterative refinement recover digits lost to pivoting.
  while (rel > 4 * std::numeric_limits<double>::epsilon() && iterations < 4 && std::isfinite(rel)) {
    x += lu.solve(r);
    r = system.rhs - A * x;
    rel = backward_error(x, r);
    ++iterations;
  }
  if (!x.allFinite() || !std::isfinite(rel) || rel > tol) throw NoConvergence(iterations, rel);

  const GridLayout& g = system.layout;
  const int nt = g.n_theta(), ns = g.n_s();
  std::vector<double> values(static_cast<std::size_t>(ns + 1) * nt);
  for (int j = 0; j <= ns; ++j)
    for (int i = 0; i < nt; ++i) {
      const int idx = g.index(i, j);
      values[static_cast<std::size_t>(j) * nt + i] = system.dirichlet[idx] ? system.rhs[idx] : x[idx];
    }
  return SolutionField(std::move(spec), g.size(), std::move(values), rel);
}

SolutionField solve_scenario(const ScenarioSpec& spec) { return solve_scenario(spec, spec.grid); }

SolutionField solve_scenario(const ScenarioSpec& spec, GridSize grid) {
  auto shared = std::make_shared<const ScenarioSpec>(spec);
  return solve(shared, assemble(spec, grid), spec.tol.linear_residual_tol);
}

SolutionField sample_field(const ScenarioSpec& spec, const ScalarExpr& expr, GridSize grid) {
  auto shared = std::make_shared<const ScenarioSpec>(spec);
  const bool disk = !spec.domain.is_annulus();
  GridLayout g(grid, disk);
  std::vector<double> values(static_cast<std::size_t>(grid.n_s + 1) * grid.n_theta);
  for (int j = 0; j <= grid.n_s; ++j)
    for (int i = 0; i < grid.n_theta; ++i) {
      double v;
      if (j == 0 && !disk) v = spec.psi_interior_at(g.theta(i));
      else if (j == grid.n_s) v = spec.psi_exterior_at(g.theta(i));
      else v = expr.evaluate(spec.domain.map(g.theta(i), g.s(j)));
      values[static_cast<std::size_t>(j) * grid.n_theta + i] = v;
    }
  return SolutionField(shared, grid, std::move(values));
}

bool satisfies_discrete_max_principle(const SolutionField& field) {
  const GridLayout& g = field.layout();
  double lo = INFINITY, hi = -INFINITY;
  auto boundary_row = [&](int j) {
    for (int i = 0; i < g.n_theta(); ++i) {
      lo = std::min(lo, field.node(i, j));
      hi = std::max(hi, field.node(i, j));
    }
  };
  boundary_row(g.n_s());
  if (!g.disk()) boundary_row(0);
  const double slack = 1e-12 * std::max(1.0, hi - lo);
  for (int j = 0; j <= g.n_s(); ++j)
    for (int i = 0; i < g.n_theta(); ++i)
      if (field.node(i, j) < lo - slack || field.node(i, j) > hi + slack) return false;
  return true;
}

double ResolvedTolerances::dedup_at(const SolutionField& f, Point p) const {
  return dedup_radius ? *dedup_radius : 3.0 * f.cell_diagonal(p);
}

ResolvedTolerances resolve_tolerances(const SolutionField& field) {
  const ToleranceSet& t = field.spec().tol;
  ResolvedTolerances r;
  r.scale = field.oscillation() > 0 ? field.oscillation() : 1.0;
  r.grad_zero_tol = t.grad_zero_tol.value_or(1e-6 * r.scale / field.domain().diameter());
  r.value_zero_tol = t.value_zero_tol.value_or(1e-3 * r.scale);
  r.equal_extrema_tol = t.equal_extrema_tol;
  r.interior_margin = t.interior_margin;
  r.dedup_radius = t.dedup_radius;
  return r;
}

std::vector<ConvergenceRow> convergence_study(const ScenarioSpec& spec, const std::vector<GridSize>& grids) {
  std::vector<ConvergenceRow> rows;
  if (grids.empty()) return rows;
  std::vector<SolutionField> fields;
  for (const GridSize& g : grids) fields.push_back(solve_scenario(spec, g));
  const SolutionField& finest = fields.back();

  for (std::size_t k = 0; k < grids.size(); ++k) {
    const SolutionField& f = fields[k];
    const GridLayout& g = f.layout();
    double err = 0.0;
    for (int j = 0; j <= g.n_s(); ++j)
      for (int i = 0; i < g.n_theta(); ++i) {
        const Point p = f.node_point(i, j);
        const double exact = spec.reference ? spec.reference->evaluate(p) : finest.value_ref(g.theta(i), g.s(j));
        err = std::max(err, std::fabs(f.node(i, j) - exact));
      }
    ConvergenceRow row{grids[k], err, std::nullopt};
    if (k > 0 && err > 0.0 && rows.back().linf_error > 0.0) row.order = std::log2(rows.back().linf_error / err);
    rows.push_back(row);
  }
  return rows;
}

std::string field_csv(const SolutionField& field) {
  const GridLayout& g = field.layout();
  std::string out = "theta,s,x,y,u\n";
  char buf[160];
  for (int j = 0; j <= g.n_s(); ++j)
    for (int i = 0; i < g.n_theta(); ++i) {
      const Point p = field.node_point(i, j);
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g\n", g.theta(i), g.s(j), p.x, p.y,
                    field.node(i, j));
      out += buf;
    }
  return out;
}

}  // namespace lslab
