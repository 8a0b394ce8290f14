#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lslab/error.hpp"
#include "lslab/expr.hpp"
#include "lslab/geometry.hpp"

namespace lslab {

// Unset optional fields are derived from the solved field (see
// resolve_tolerances in solver.hpp).
struct ToleranceSet {
  std::optional<double> grad_zero_tol;
  std::optional<double> value_zero_tol;
  std::optional<double> dedup_radius;
  double equal_extrema_tol = 1e-6;
  double linear_residual_tol = 1e-10;
  double interior_margin = 0.05;
  double ellipticity_floor = 1e-8;
};

struct GridSize {
  int n_theta = 128;
  int n_s = 64;
  bool operator==(const GridSize&) const = default;
};

// L u = a11 u_xx + 2 a12 u_xy + a22 u_yy + b1 u_x + b2 u_y + c u.
struct EllipticOperator {
  ScalarExpr a11 = ScalarExpr::constant(1.0);
  ScalarExpr a12 = ScalarExpr::constant(0.0);
  ScalarExpr a22 = ScalarExpr::constant(1.0);
  ScalarExpr b1 = ScalarExpr::constant(0.0);
  ScalarExpr b2 = ScalarExpr::constant(0.0);
  std::optional<ScalarExpr> c;

  bool first_order_free() const;  // b1, b2 are the literal constant 0
  bool zeroth_order_free() const;
};

struct ScenarioSpec {
  std::string name;
  DomainSpec domain;
  EllipticOperator op;
  std::optional<ScalarExpr> psi_interior;
  ScalarExpr psi_exterior;
  GridSize grid;
  ToleranceSet tol;
  std::optional<ScalarExpr> reference;  // closed-form solution, if known
  std::string source;                   // raw scenario text, fingerprinted in reports

  double psi_interior_at(double theta) const;
  double psi_exterior_at(double theta) const;
  bool interior_is_constant() const { return psi_interior && psi_interior->is_constant(); }
};

struct Violation {
  std::string invariant;
  std::string message;
  std::optional<Point> witness;
};

class ValidationErrors : public Error {
 public:
  explicit ValidationErrors(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

// Complete list of invariant violations; empty means the scenario is valid.
// Never throws for malformed content.
std::vector<Violation> validate_scenario(const ScenarioSpec& spec);

// Throws ValidationErrors when validate_scenario reports anything.
const ScenarioSpec& require_valid(const ScenarioSpec& spec);

}  // namespace lslab
