#include "lslab/critical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>

namespace lslab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double norm(double a, double b) { return std::hypot(a, b); }

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::string describe(Point p) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%.6g, %.6g)", p.x, p.y);
  return buf;
}

struct NewtonOutcome {
  bool converged = false;
  Point location;
  std::string failure;
};

NewtonOutcome newton(const SolutionField& f, Point x, double tol, double trust) {
  NewtonOutcome out;
  FieldDerivatives d;
  try {
    d = f.derivatives(x);
  } catch (const Error& e) {
    out.failure = e.what();
    return out;
  }
  double gnorm = norm(d.ux, d.uy);
  for (int step = 0; step < 50; ++step) {
    if (gnorm <= tol) {
      out.converged = true;
      out.location = x;
      return out;
    }
    // Levenberg-style regularised Newton step on grad u = 0 with the
    // interpolated Hessian; the regularisation only matters near degenerate
    // points where the Hessian vanishes.
    const double h11 = d.uxx, h12 = d.uxy, h22 = d.uyy;
    const double a11 = h11 * h11 + h12 * h12, a12 = h11 * h12 + h12 * h22, a22 = h12 * h12 + h22 * h22;
    const double mu = 1e-12 * (a11 + a22) + 1e-300;
    const double b1 = -(h11 * d.ux + h12 * d.uy), b2 = -(h12 * d.ux + h22 * d.uy);
    const double det = (a11 + mu) * (a22 + mu) - a12 * a12;
    double dx = ((a22 + mu) * b1 - a12 * b2) / det;
    double dy = ((a11 + mu) * b2 - a12 * b1) / det;
    if (!std::isfinite(dx) || !std::isfinite(dy)) {
      out.failure = "singular Hessian";
      return out;
    }
    const double len = norm(dx, dy);
    if (len > trust) {
      dx *= trust / len;
      dy *= trust / len;
    }
    bool accepted = false;
    for (int halving = 0; halving < 12; ++halving) {
      const Point trial{x.x + dx, x.y + dy};
      try {
        const FieldDerivatives dt = f.derivatives(trial);
        const double gt = norm(dt.ux, dt.uy);
        if (gt < gnorm) {
          x = trial;
          d = dt;
          gnorm = gt;
          accepted = true;
          break;
        }
      } catch (const OutsideDomain&) {
      }
      dx *= 0.5;
      dy *= 0.5;
    }
    if (!accepted) {
      out.failure = "no descent step for |grad u| = " + std::to_string(gnorm);
      return out;
    }
  }
  if (gnorm <= tol) {
    out.converged = true;
    out.location = x;
    return out;
  }
  out.failure = "not converged after 50 steps (|grad u| = " + std::to_string(gnorm) + ")";
  return out;
}

bool in_margin_band(const DomainSpec& dom, double s, double margin) {
  if (s > 1.0 - margin) return true;
  return dom.is_annulus() && s < margin;
}

// Continuous angle of grad u, unwrapped along the circle.
int unwrapped_winding(const std::vector<double>& angles) {
  double total = 0;
  const std::size_t n = angles.size();
  for (std::size_t k = 0; k < n; ++k) {
    double d = angles[(k + 1) % n] - angles[k];
    d = std::remainder(d, kTwoPi);
    total += d;
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

}  // namespace

int CriticalSearch::total_multiplicity() const {
  int m = 0;
  for (const auto& p : points) m += p.multiplicity;
  return m;
}

double gradient_winding(const SolutionField& field, Point c, double radius, int samples) {
  double total = 0;
  for (int k = 0; k < samples; ++k) {
    const double phi = kTwoPi * k / samples;
    const Point p{c.x + radius * std::cos(phi), c.y + radius * std::sin(phi)};
    const FieldDerivatives d = field.derivatives(p);
    // d/dphi of grad u = H * (dx/dphi)
    const double tx = -radius * std::sin(phi), ty = radius * std::cos(phi);
    const double dg1 = d.uxx * tx + d.uxy * ty;
    const double dg2 = d.uxy * tx + d.uyy * ty;
    total += (d.ux * dg2 - d.uy * dg1) / (d.ux * d.ux + d.uy * d.uy);
  }
  return total / samples;  // (1/2pi) * integral with step 2pi/samples
}

MultiplicityResult multiplicity(const SolutionField& field, Point p, const ResolvedTolerances& tol,
                                const std::vector<Point>& others, double min_radius) {
  double limit = INFINITY;
  Point nearest{};
  for (const Point& o : others) {
    const double d = 0.5 * dist(p, o);
    if (d > 0 && d < limit) {
      limit = d;
      nearest = o;
    }
  }
  double rho = std::max(2.0 * field.cell_diagonal(p), min_radius);
  for (int doubling = 0; doubling <= 8; ++doubling, rho *= 2.0) {
    if (rho > limit)
      throw RadiusExhausted("degree circle around " + describe(p) + " would reach critical point " +
                            describe(nearest));
    double min_grad = INFINITY;
    std::vector<double> angles(256);
    for (int k = 0; k < 256; ++k) {
      const double phi = kTwoPi * k / 256;
      const Point q{p.x + rho * std::cos(phi), p.y + rho * std::sin(phi)};
      std::array<double, 2> g;
      try {
        g = field.gradient(q);
      } catch (const OutsideDomain&) {
        throw RadiusExhausted("degree circle around " + describe(p) + " leaves the domain at radius " +
                              std::to_string(rho));
      }
      min_grad = std::min(min_grad, norm(g[0], g[1]));
      angles[k] = std::atan2(g[1], g[0]);
    }
    if (!(min_grad > 5.0 * tol.grad_zero_tol)) continue;

    const int integer = unwrapped_winding(angles);
    double raw = gradient_winding(field, p, rho, 256);
    if (std::fabs(raw - integer) > 0.05) raw = gradient_winding(field, p, rho, 1024);
    if (std::fabs(raw - std::round(raw)) > 0.05 || std::lround(raw) != integer)
      throw DegreeAmbiguous("gradient winding " + std::to_string(raw) + " around " + describe(p) +
                            " is not near an integer");
    return {-integer, raw, rho};
  }
  throw RadiusExhausted("gradient stays below 5 x grad_zero_tol on every circle around " + describe(p));
}

void sort_critical_points(std::vector<CriticalPoint>& points, double value_tol) {
  std::sort(points.begin(), points.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) { return a.value < b.value; });
  auto angle = [](const CriticalPoint& c) {
    double a = std::atan2(c.location.y, c.location.x);
    return a < 0 ? a + kTwoPi : a;
  };
  std::size_t start = 0;
  while (start < points.size()) {
    std::size_t end = start + 1;
    while (end < points.size() && points[end].value - points[end - 1].value <= value_tol) ++end;
    std::sort(points.begin() + start, points.begin() + end, [&](const CriticalPoint& a, const CriticalPoint& b) {
      const double aa = angle(a), ab = angle(b);
      if (aa != ab) return aa < ab;
      return std::hypot(a.location.x, a.location.y) < std::hypot(b.location.x, b.location.y);
    });
    start = end;
  }
}

CriticalSearch find_critical_points(const SolutionField& field, const ResolvedTolerances& tol) {
  const GridLayout& g = field.layout();
  const DomainSpec& dom = field.domain();
  const int nt = g.n_theta(), ns = g.n_s();
  CriticalSearch out;

  // Gradient at every node.
  std::vector<std::array<double, 2>> ng(static_cast<std::size_t>(ns + 1) * nt);
  auto at = [&](int i, int j) -> std::array<double, 2>& { return ng[static_cast<std::size_t>(j) * nt + g.wrap(i)]; };
  for (int j = 0; j <= ns; ++j)
    for (int i = 0; i < nt; ++i) at(i, j) = field.gradient(field.node_point(i, j));

  std::vector<Point> seeds;
  for (int j = 0; j < ns; ++j)
    for (int i = 0; i < nt; ++i) {
      bool xpos = false, xneg = false, ypos = false, yneg = false;
      for (auto [di, dj] : {std::pair{0, 0}, {1, 0}, {0, 1}, {1, 1}}) {
        const auto& v = at(i + di, j + dj);
        xpos |= v[0] >= 0;
        xneg |= v[0] <= 0;
        ypos |= v[1] >= 0;
        yneg |= v[1] <= 0;
      }
      const Point c = dom.map(g.theta(i) + 0.5 * g.h_theta(), g.s(j) + 0.5 * g.h_s());
      bool flag = xpos && xneg && ypos && yneg;
      if (!flag) {
        const auto gc = field.gradient(c);
        flag = norm(gc[0], gc[1]) < 10.0 * tol.grad_zero_tol;
      }
      if (flag) seeds.push_back(c);
    }
  // Local minima of |grad u| over the 8-neighbourhood catch degenerate points
  // whose gradient components touch zero without changing sign on a cell.
  for (int j = 1; j < ns; ++j)
    for (int i = 0; i < nt; ++i) {
      const double here = norm(at(i, j)[0], at(i, j)[1]);
      bool minimum = true;
      for (int dj = -1; dj <= 1 && minimum; ++dj)
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0) continue;
          if (g.disk() && j + dj == 0) continue;
          const auto& v = at(i + di, j + dj);
          if (norm(v[0], v[1]) < here) {
            minimum = false;
            break;
          }
        }
      if (minimum) seeds.push_back(field.node_point(i, j));
    }
  if (g.disk()) seeds.push_back(Point{0, 0});
  out.seeds = static_cast<int>(seeds.size());

  std::vector<Point> found;
  for (const Point& seed : seeds) {
    const NewtonOutcome r = newton(field, seed, tol.grad_zero_tol, 2.0 * field.cell_diagonal(seed));
    if (!r.converged) {
      out.issues.push_back({"NewtonStall", "seed " + describe(seed) + ": " + r.failure, seed});
      continue;
    }
    found.push_back(r.location);
  }

  // Single-linkage clustering within the dedup radius.
  const std::size_t n = found.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> root = [&](std::size_t a) {
    return parent[a] == a ? a : parent[a] = root(parent[a]);
  };
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (dist(found[a], found[b]) <= std::max(tol.dedup_at(field, found[a]), tol.dedup_at(field, found[b])))
        parent[root(a)] = root(b);

  struct Cluster {
    Point best;
    double best_grad = INFINITY;
    double spread = 0;
    std::vector<Point> members;
  };
  std::vector<Cluster> clusters;
  std::vector<long> cluster_of(n, -1);
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t r = root(a);
    if (cluster_of[r] < 0) {
      cluster_of[r] = static_cast<long>(clusters.size());
      clusters.emplace_back();
    }
    Cluster& c = clusters[cluster_of[r]];
    c.members.push_back(found[a]);
    const auto gr = field.gradient(found[a]);
    if (norm(gr[0], gr[1]) < c.best_grad) {
      c.best_grad = norm(gr[0], gr[1]);
      c.best = found[a];
    }
  }
  for (Cluster& c : clusters)
    for (const Point& m : c.members) c.spread = std::max(c.spread, dist(c.best, m));

  std::vector<Cluster> interior;
  for (Cluster& c : clusters) {
    const RefCoord rc = dom.inverse(c.best, 1e-9);
    if (in_margin_band(dom, rc.s, tol.interior_margin)) {
      out.suspects.push_back({c.best, field.evaluate(c.best), rc.s});
      continue;
    }
    interior.push_back(std::move(c));
  }

  std::vector<Point> centers;
  for (const Cluster& c : interior) centers.push_back(c.best);
  for (std::size_t k = 0; k < interior.size(); ++k) {
    const Cluster& c = interior[k];
    std::vector<Point> others;
    for (std::size_t o = 0; o < centers.size(); ++o)
      if (o != k) others.push_back(centers[o]);
    try {
      const MultiplicityResult m = multiplicity(field, c.best, tol, others, c.spread > 0 ? 2.0 * c.spread : 0.0);
      if (m.multiplicity < 1) {
        out.issues.push_back({"DegreeAmbiguous",
                              "gradient winding " + std::to_string(m.winding) + " at " + describe(c.best) +
                                  " gives no positive multiplicity",
                              c.best});
        continue;
      }
      CriticalPoint cp;
      cp.location = c.best;
      cp.value = field.evaluate(c.best);
      cp.multiplicity = m.multiplicity;
      cp.degree_radius = m.radius;
      cp.winding = m.winding;
      cp.is_zero = std::fabs(cp.value) <= tol.value_zero_tol;
      out.points.push_back(cp);
    } catch (const Error& e) {
      out.issues.push_back({e.kind(), e.what(), c.best});
    }
  }
  sort_critical_points(out.points, tol.equal_extrema_tol * tol.scale);
  std::sort(out.suspects.begin(), out.suspects.end(), [](const NearBoundarySuspect& a, const NearBoundarySuspect& b) {
    return a.value != b.value ? a.value < b.value : a.location.x < b.location.x;
  });
  return out;
}

std::vector<CriticalPoint> zero_points_of(const CriticalSearch& search) {
  std::vector<CriticalPoint> z;
  for (const auto& p : search.points)
    if (p.is_zero) z.push_back(p);
  return z;
}

std::vector<CriticalPoint> find_critical_zero_points(const SolutionField& field, const ResolvedTolerances& tol) {
  return zero_points_of(find_critical_points(field, tol));
}

std::string critical_csv(const std::vector<CriticalPoint>& points) {
  std::string out = "x,y,u,multiplicity,is_zero,degree_radius\n";
  char buf[200];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%d,%s,%.12g\n", p.location.x, p.location.y, p.value,
                  p.multiplicity, p.is_zero ? "true" : "false", p.degree_radius);
    out += buf;
  }
  return out;
}

}  // namespace lslab
