#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <array>
#include <memory>
#include <string>
#include <vector>

#include "lslab/scenario.hpp"

namespace lslab {

// Node layout of the boundary-fitted grid. theta_i = 2 pi i / n_theta
// (periodic), s_j = j / n_s, j = 0..n_s. For a disk-like domain the j = 0
// ring is a single center unknown.
class GridLayout {
 public:
  GridLayout(GridSize size, bool disk) : size_(size), disk_(disk) {}

  GridSize size() const { return size_; }
  bool disk() const { return disk_; }
  int n_theta() const { return size_.n_theta; }
  int n_s() const { return size_.n_s; }
  double h_theta() const;
  double h_s() const { return 1.0 / size_.n_s; }
  double theta(int i) const { return h_theta() * i; }
  double s(int j) const { return static_cast<double>(j) / size_.n_s; }

  int unknowns() const;
  int index(int i, int j) const;  // i taken modulo n_theta
  int wrap(int i) const;

 private:
  GridSize size_;
  bool disk_;
};

struct DiscreteSystem {
  GridLayout layout{GridSize{}, false};
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
  Eigen::VectorXd rhs;
  std::vector<char> dirichlet;  // per unknown
};

DiscreteSystem assemble(const ScenarioSpec& spec);
DiscreteSystem assemble(const ScenarioSpec& spec, GridSize grid);

// Interior rows only: entries off the diagonal are nonnegative and the
// diagonal is negative with zero row sum, so the discrete maximum principle
// applies.
bool is_m_matrix(const DiscreteSystem& system);

struct RefDerivatives {
  double f = 0, ft = 0, fs = 0, ftt = 0, fts = 0, fss = 0;
};

struct FieldDerivatives {
  double value = 0;
  double ux = 0, uy = 0;
  double uxx = 0, uxy = 0, uyy = 0;
};

// Discrete solution with a C1 piecewise bicubic Hermite interpolant in
// reference coordinates. Near a disk center the interpolant blends into a
// least-squares cubic in Cartesian coordinates.
class SolutionField {
 public:
  // values has (n_s + 1) * n_theta entries, row j at offset j * n_theta. For
  // disk layouts every entry of row 0 must equal the center value.
  SolutionField(std::shared_ptr<const ScenarioSpec> spec, GridSize grid, std::vector<double> values,
                double residual = 0.0);

  const ScenarioSpec& spec() const { return *spec_; }
  std::shared_ptr<const ScenarioSpec> spec_ptr() const { return spec_; }
  const GridLayout& layout() const { return layout_; }
  const DomainSpec& domain() const { return spec_->domain; }

  double node(int i, int j) const { return values_[static_cast<std::size_t>(j) * layout_.n_theta() + layout_.wrap(i)]; }
  Point node_point(int i, int j) const;
  double residual() const { return residual_; }

  double min_value() const { return min_; }
  double max_value() const { return max_; }
  double oscillation() const { return max_ - min_; }

  // Reference-coordinate evaluation, theta any real, s in [0, 1].
  double value_ref(double theta, double s) const;

  // Throws OutsideDomain when p is not in the closed domain.
  double evaluate(Point p) const;
  std::array<double, 2> gradient(Point p) const;
  FieldDerivatives derivatives(Point p) const;

  // Heuristic bound on the interpolation error (max over cells of the gap
  // between the bicubic center value and a curvature-corrected bilinear one).
  double interpolation_error() const { return interp_error_; }

  // Length of the diagonal of the grid cell containing p.
  double cell_diagonal(Point p) const;
  double max_cell_diagonal() const;

 private:
  RefDerivatives bicubic(double theta, double s) const;
  FieldDerivatives cartesian_from_ref(const RefDerivatives& r, Point p) const;
  FieldDerivatives center_poly(Point p) const;
  void build_nodal_derivatives();
  void fit_center_poly();
  double ghost(int i, int j) const;  // value at s_j for j < 0 (disk only)

  std::shared_ptr<const ScenarioSpec> spec_;
  GridLayout layout_;
  std::vector<double> values_;
  std::vector<double> ft_, fs_, fts_;
  std::array<double, 10> poly_{};  // 1 x y x2 xy y2 x3 x2y xy2 y3
  double residual_ = 0.0;
  double min_ = 0.0, max_ = 0.0;
  double interp_error_ = 0.0;
};

// Throws NoConvergence if the factorisation fails or the relative residual
// exceeds tol; never returns a non-finite field.
SolutionField solve(std::shared_ptr<const ScenarioSpec> spec, const DiscreteSystem& system, double tol);
SolutionField solve_scenario(const ScenarioSpec& spec);
SolutionField solve_scenario(const ScenarioSpec& spec, GridSize grid);

// Field built from exact samples of a closed form at the grid nodes.
SolutionField sample_field(const ScenarioSpec& spec, const ScalarExpr& expr, GridSize grid);

// True when min boundary value <= u <= max boundary value at every node.
bool satisfies_discrete_max_principle(const SolutionField& field);

struct ResolvedTolerances {
  double grad_zero_tol = 0;
  double value_zero_tol = 0;
  double equal_extrema_tol = 0;
  double interior_margin = 0;
  std::optional<double> dedup_radius;  // fixed radius when configured
  double scale = 1;                    // oscillation of u, used for relative tolerances
  double dedup_at(const SolutionField& f, Point p) const;
};

ResolvedTolerances resolve_tolerances(const SolutionField& field);

struct ConvergenceRow {
  GridSize grid;
  double linf_error = 0;
  std::optional<double> order;  // log2(e_prev / e) against the previous row
};

// Reference is the scenario's closed form; without one the finest grid is used.
std::vector<ConvergenceRow> convergence_study(const ScenarioSpec& spec, const std::vector<GridSize>& grids);

// CSV with header theta,s,x,y,u, one line per grid node.
std::string field_csv(const SolutionField& field);

}  // namespace lslab
