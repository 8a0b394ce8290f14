#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "lslab/solver.hpp"

namespace lslab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Cubic Hermite basis on [0, 1] and its first two derivatives.
struct Hermite {
  double h00, h10, h01, h11;
};

Hermite basis(double a) {
  const double a2 = a * a, a3 = a2 * a;
  return {2 * a3 - 3 * a2 + 1, a3 - 2 * a2 + a, -2 * a3 + 3 * a2, a3 - a2};
}
Hermite basis_d1(double a) {
  const double a2 = a * a;
  return {6 * a2 - 6 * a, 3 * a2 - 4 * a + 1, -6 * a2 + 6 * a, 3 * a2 - 2 * a};
}
Hermite basis_d2(double a) { return {12 * a - 6, 6 * a - 4, -12 * a + 6, 6 * a - 2}; }

// C1 smoothstep from 0 at s = lo to 1 at s = hi, with first and second
// derivatives.
struct Blend {
  double w, dw, d2w;
};

Blend smoothstep(double s, double lo, double hi) {
  if (s <= lo) return {0, 0, 0};
  if (s >= hi) return {1, 0, 0};
  const double L = hi - lo;
  const double t = (s - lo) / L;
  return {t * t * (3 - 2 * t), 6 * t * (1 - t) / L, (6 - 12 * t) / (L * L)};
}

}  // namespace

SolutionField::SolutionField(std::shared_ptr<const ScenarioSpec> spec, GridSize grid, std::vector<double> values,
                             double residual)
    : spec_(std::move(spec)),
      layout_(grid, !spec_->domain.is_annulus()),
      values_(std::move(values)),
      residual_(residual) {
  const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  min_ = *lo;
  max_ = *hi;
  if (layout_.disk()) fit_center_poly();
  build_nodal_derivatives();
}

Point SolutionField::node_point(int i, int j) const { return domain().map(layout_.theta(i), layout_.s(j)); }

void SolutionField::fit_center_poly() {
  // Cubic through the center value, least squares over the first three rings.
  const int nt = layout_.n_theta();
  const int rings = std::min(3, layout_.n_s());
  Eigen::MatrixXd M(rings * nt, 9);
  Eigen::VectorXd rhs(rings * nt);
  const double u0 = node(0, 0);
  double scale = 0.0;
  for (int j = 1; j <= rings; ++j)
    for (int i = 0; i < nt; ++i) scale = std::max(scale, std::hypot(node_point(i, j).x, node_point(i, j).y));
  for (int j = 1; j <= rings; ++j)
    for (int i = 0; i < nt; ++i) {
      const Point p = node_point(i, j);
      const double x = p.x / scale, y = p.y / scale;
      const int r = (j - 1) * nt + i;
      M.row(r) << x, y, x * x, x * y, y * y, x * x * x, x * x * y, x * y * y, y * y * y;
      rhs[r] = node(i, j) - u0;
    }
  const Eigen::VectorXd c = M.colPivHouseholderQr().solve(rhs);
  poly_[0] = u0;
  const double s1 = 1.0 / scale, s2 = s1 * s1, s3 = s2 * s1;
  poly_[1] = c[0] * s1;
  poly_[2] = c[1] * s1;
  poly_[3] = c[2] * s2;
  poly_[4] = c[3] * s2;
  poly_[5] = c[4] * s2;
  poly_[6] = c[5] * s3;
  poly_[7] = c[6] * s3;
  poly_[8] = c[7] * s3;
  poly_[9] = c[8] * s3;
}

FieldDerivatives SolutionField::center_poly(Point p) const {
  const auto& c = poly_;
  const double x = p.x, y = p.y;
  FieldDerivatives d;
  d.value = c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y + c[6] * x * x * x +
            c[7] * x * x * y + c[8] * x * y * y + c[9] * y * y * y;
  d.ux = c[1] + 2 * c[3] * x + c[4] * y + 3 * c[6] * x * x + 2 * c[7] * x * y + c[8] * y * y;
  d.uy = c[2] + c[4] * x + 2 * c[5] * y + c[7] * x * x + 2 * c[8] * x * y + 3 * c[9] * y * y;
  d.uxx = 2 * c[3] + 6 * c[6] * x + 2 * c[7] * y;
  d.uxy = c[4] + 2 * c[7] * x + 2 * c[8] * y;
  d.uyy = 2 * c[5] + 2 * c[8] * x + 6 * c[9] * y;
  return d;
}

double SolutionField::ghost(int i, int j) const {
  const double th = layout_.theta(i);
  return center_poly(domain().map(th, layout_.s(j))).value;
}

void SolutionField::build_nodal_derivatives() {
  const int nt = layout_.n_theta(), ns = layout_.n_s();
  const double ht = layout_.h_theta(), hs = layout_.h_s();
  const std::size_t total = static_cast<std::size_t>(ns + 1) * nt;
  ft_.assign(total, 0.0);
  fs_.assign(total, 0.0);
  fts_.assign(total, 0.0);
  auto at = [&](int i, int j) -> double {
    if (j < 0) return ghost(i, j);
    return node(i, j);
  };
  auto idx = [&](int i, int j) { return static_cast<std::size_t>(j) * nt + layout_.wrap(i); };

  for (int j = 0; j <= ns; ++j)
    for (int i = 0; i < nt; ++i) {
      ft_[idx(i, j)] = (-at(i + 2, j) + 8 * at(i + 1, j) - 8 * at(i - 1, j) + at(i - 2, j)) / (12 * ht);
      double d;
      if (layout_.disk() && j == 0) {
        // Radial derivative of the center polynomial along the ray.
        const double th = layout_.theta(i);
        const FieldDerivatives c = center_poly(Point{0, 0});
        d = domain().outer_radius(th) * (c.ux * std::cos(th) + c.uy * std::sin(th));
      } else if ((j >= 2 || layout_.disk()) && j <= ns - 2) {
        d = (-at(i, j + 2) + 8 * at(i, j + 1) - 8 * at(i, j - 1) + at(i, j - 2)) / (12 * hs);
      } else if (j == 0) {
        d = (-25 * at(i, 0) + 48 * at(i, 1) - 36 * at(i, 2) + 16 * at(i, 3) - 3 * at(i, 4)) / (12 * hs);
      } else if (j == 1) {
        d = (-3 * at(i, 0) - 10 * at(i, 1) + 18 * at(i, 2) - 6 * at(i, 3) + at(i, 4)) / (12 * hs);
      } else if (j == ns) {
        d = (25 * at(i, ns) - 48 * at(i, ns - 1) + 36 * at(i, ns - 2) - 16 * at(i, ns - 3) + 3 * at(i, ns - 4)) /
            (12 * hs);
      } else {
        d = (3 * at(i, ns) + 10 * at(i, ns - 1) - 18 * at(i, ns - 2) + 6 * at(i, ns - 3) - at(i, ns - 4)) / (12 * hs);
      }
      fs_[idx(i, j)] = d;
    }
  for (int j = 0; j <= ns; ++j)
    for (int i = 0; i < nt; ++i) {
      if (layout_.disk() && j == 0) ft_[idx(i, j)] = 0.0;
      fts_[idx(i, j)] = (-fs_[idx(i + 2, j)] + 8 * fs_[idx(i + 1, j)] - 8 * fs_[idx(i - 1, j)] + fs_[idx(i - 2, j)]) /
                        (12 * ht);
    }

  double err = 0.0;
  for (int j = layout_.disk() ? 1 : 0; j < ns; ++j)
    for (int i = 0; i < nt; ++i) {
      const double avg = 0.25 * (node(i, j) + node(i + 1, j) + node(i, j + 1) + node(i + 1, j + 1));
      const double ftt = 0.5 * ((node(i + 2, j) - node(i + 1, j) - node(i, j) + node(i - 1, j)) +
                                (node(i + 2, j + 1) - node(i + 1, j + 1) - node(i, j + 1) + node(i - 1, j + 1))) /
                         (2 * ht * ht);
      const double fss = 0.5 * (fs_[idx(i, j + 1)] - fs_[idx(i, j)] + fs_[idx(i + 1, j + 1)] - fs_[idx(i + 1, j)]) / hs;
      const double corrected = avg - ht * ht / 8 * ftt - hs * hs / 8 * fss;
      const double b = bicubic(layout_.theta(i) + 0.5 * ht, layout_.s(j) + 0.5 * hs).f;
      err = std::max(err, std::fabs(b - corrected));
    }
  interp_error_ = err;
}

RefDerivatives SolutionField::bicubic(double theta, double s) const {
  const int nt = layout_.n_theta(), ns = layout_.n_s();
  const double ht = layout_.h_theta(), hs = layout_.h_s();
  double tw = std::fmod(theta, kTwoPi);
  if (tw < 0) tw += kTwoPi;
  int i = std::min(static_cast<int>(tw / ht), nt - 1);
  int j = std::clamp(static_cast<int>(s / hs), 0, ns - 1);
  const double a = std::clamp(tw / ht - i, 0.0, 1.0);
  const double b = (s - j * hs) / hs;

  const Hermite A0 = basis(a), A1 = basis_d1(a), A2 = basis_d2(a);
  const Hermite B0 = basis(b), B1 = basis_d1(b), B2 = basis_d2(b);
  RefDerivatives r;
  for (int ci = 0; ci < 2; ++ci)
    for (int cj = 0; cj < 2; ++cj) {
      const std::size_t k = static_cast<std::size_t>(j + cj) * nt + layout_.wrap(i + ci);
      const double f = values_[k], ft = ft_[k] * ht, fs = fs_[k] * hs, fts = fts_[k] * ht * hs;
      const double pa0 = ci ? A0.h01 : A0.h00, qa0 = ci ? A0.h11 : A0.h10;
      const double pa1 = ci ? A1.h01 : A1.h00, qa1 = ci ? A1.h11 : A1.h10;
      const double pa2 = ci ? A2.h01 : A2.h00, qa2 = ci ? A2.h11 : A2.h10;
      const double pb0 = cj ? B0.h01 : B0.h00, qb0 = cj ? B0.h11 : B0.h10;
      const double pb1 = cj ? B1.h01 : B1.h00, qb1 = cj ? B1.h11 : B1.h10;
      const double pb2 = cj ? B2.h01 : B2.h00, qb2 = cj ? B2.h11 : B2.h10;
      auto term = [&](double ua, double va, double ub, double vb) {
        return f * ua * ub + ft * va * ub + fs * ua * vb + fts * va * vb;
      };
      r.f += term(pa0, qa0, pb0, qb0);
      r.ft += term(pa1, qa1, pb0, qb0) / ht;
      r.fs += term(pa0, qa0, pb1, qb1) / hs;
      r.ftt += term(pa2, qa2, pb0, qb0) / (ht * ht);
      r.fts += term(pa1, qa1, pb1, qb1) / (ht * hs);
      r.fss += term(pa0, qa0, pb2, qb2) / (hs * hs);
    }
  return r;
}

FieldDerivatives SolutionField::cartesian_from_ref(const RefDerivatives& r, Point p) const {
  const InverseMetric m = domain().inverse_metric(p);
  FieldDerivatives d;
  d.value = r.f;
  d.ux = r.ft * m.tx + r.fs * m.sx;
  d.uy = r.ft * m.ty + r.fs * m.sy;
  d.uxx = r.ftt * m.tx * m.tx + 2 * r.fts * m.tx * m.sx + r.fss * m.sx * m.sx + r.ft * m.txx + r.fs * m.sxx;
  d.uyy = r.ftt * m.ty * m.ty + 2 * r.fts * m.ty * m.sy + r.fss * m.sy * m.sy + r.ft * m.tyy + r.fs * m.syy;
  d.uxy = r.ftt * m.tx * m.ty + r.fts * (m.tx * m.sy + m.ty * m.sx) + r.fss * m.sx * m.sy + r.ft * m.txy +
          r.fs * m.sxy;
  return d;
}

double SolutionField::value_ref(double theta, double s) const {
  if (layout_.disk()) {
    const double s1 = layout_.h_s();
    const Blend w = smoothstep(s, 0.5 * s1, s1);
    if (w.w == 1.0) return bicubic(theta, s).f;
    const double poly = center_poly(domain().map(theta, s)).value;
    if (w.w == 0.0) return poly;
    return (1 - w.w) * poly + w.w * bicubic(theta, s).f;
  }
  return bicubic(theta, s).f;
}

FieldDerivatives SolutionField::derivatives(Point p) const {
  const RefCoord rc = domain().inverse(p, 1e-12);
  if (!layout_.disk()) return cartesian_from_ref(bicubic(rc.theta, rc.s), p);

  const double s1 = layout_.h_s();
  const Blend w = smoothstep(rc.s, 0.5 * s1, s1);
  if (w.w == 0.0) return center_poly(p);
  const FieldDerivatives B = cartesian_from_ref(bicubic(rc.theta, rc.s), p);
  if (w.w == 1.0) return B;
  const FieldDerivatives P = center_poly(p);
  const InverseMetric m = domain().inverse_metric(p);
  // u = P + w (B - P), w = w(s(x, y)).
  const double D = B.value - P.value;
  const double Dx = B.ux - P.ux, Dy = B.uy - P.uy;
  const double wx = w.dw * m.sx, wy = w.dw * m.sy;
  const double wxx = w.d2w * m.sx * m.sx + w.dw * m.sxx;
  const double wyy = w.d2w * m.sy * m.sy + w.dw * m.syy;
  const double wxy = w.d2w * m.sx * m.sy + w.dw * m.sxy;
  FieldDerivatives d;
  d.value = P.value + w.w * D;
  d.ux = P.ux + w.w * Dx + wx * D;
  d.uy = P.uy + w.w * Dy + wy * D;
  d.uxx = P.uxx + w.w * (B.uxx - P.uxx) + 2 * wx * Dx + wxx * D;
  d.uyy = P.uyy + w.w * (B.uyy - P.uyy) + 2 * wy * Dy + wyy * D;
  d.uxy = P.uxy + w.w * (B.uxy - P.uxy) + wx * Dy + wy * Dx + wxy * D;
  return d;
}

double SolutionField::evaluate(Point p) const {
  const RefCoord rc = domain().inverse(p, 1e-12);
  if (layout_.disk() && std::hypot(p.x, p.y) == 0.0) return node(0, 0);
  return value_ref(rc.theta, rc.s);
}

std::array<double, 2> SolutionField::gradient(Point p) const {
  const FieldDerivatives d = derivatives(p);
  return {d.ux, d.uy};
}

double SolutionField::cell_diagonal(Point p) const {
  RefCoord rc{};
  try {
    rc = domain().inverse(p, 1.0);
  } catch (const Error&) {
    return max_cell_diagonal();
  }
  const double ht = layout_.h_theta(), hs = layout_.h_s();
  const double th = std::floor(rc.theta / ht) * ht;
  const double s = std::min(std::floor(rc.s / hs) * hs, 1.0 - hs);
  const Point a = domain().map(th, s), b = domain().map(th + ht, s + hs);
  const Point c = domain().map(th + ht, s), d = domain().map(th, s + hs);
  return std::max(std::hypot(a.x - b.x, a.y - b.y), std::hypot(c.x - d.x, c.y - d.y));
}

double SolutionField::max_cell_diagonal() const {
  double best = 0.0;
  const int nt = layout_.n_theta(), ns = layout_.n_s();
  for (int j = 0; j < ns; j += std::max(1, ns / 8))
    for (int i = 0; i < nt; ++i) {
      const Point a = node_point(i, j), b = node_point(i + 1, j + 1);
      best = std::max(best, std::hypot(a.x - b.x, a.y - b.y));
    }
  for (int i = 0; i < nt; ++i) {
    const Point a = node_point(i, ns - 1), b = node_point(i + 1, ns);
    best = std::max(best, std::hypot(a.x - b.x, a.y - b.y));
  }
  return best;
}

}  // namespace lslab
