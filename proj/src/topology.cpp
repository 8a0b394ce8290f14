#include "lslab/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>
#include <unordered_map>

namespace lslab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct RawComponent {
  signed char cls = 0;
  std::vector<int> cells;
  bool encircles = false;
  bool has_center = false;
};

// 4-connected labeling of cells with equal nonzero class. The unwrapped
// column carried along the flood fill detects components that wind around
// the hole.
std::vector<RawComponent> label_cells(const RefinedGrid& g, const std::vector<signed char>& cls) {
  const int n = g.cells(), nt = g.n_theta(), ns = g.n_s();
  std::vector<int> comp(n, -1), ucol(n, 0);
  std::vector<RawComponent> out;
  std::deque<int> queue;
  for (int start = 0; start < n; ++start) {
    if (cls[start] == 0 || comp[start] >= 0) continue;
    const int id = static_cast<int>(out.size());
    RawComponent rc;
    rc.cls = cls[start];
    comp[start] = id;
    ucol[start] = g.disk() && start == g.center_cell() ? 0 : g.col(start);
    queue.push_back(start);
    auto visit = [&](int y, int uy) {
      if (cls[y] != rc.cls) return;
      if (comp[y] < 0) {
        comp[y] = id;
        ucol[y] = uy;
        queue.push_back(y);
      } else if (ucol[y] != uy) {
        rc.encircles = true;
      }
    };
    while (!queue.empty()) {
      const int x = queue.front();
      queue.pop_front();
      rc.cells.push_back(x);
      if (g.disk() && x == g.center_cell()) {
        rc.has_center = true;
        for (int a = 0; a < nt; ++a) {
          const int y = g.cell(a, 0);
          if (cls[y] == rc.cls && comp[y] < 0) {
            comp[y] = id;
            ucol[y] = a;
            queue.push_back(y);
          }
        }
        continue;
      }
      const int a = g.col(x), b = g.row(x), ux = ucol[x];
      visit(g.cell(a - 1, b), ux - 1);
      visit(g.cell(a + 1, b), ux + 1);
      if (b + 1 < ns) visit(g.cell(a, b + 1), ux);
      if (b > 0) {
        visit(g.cell(a, b - 1), ux);
      } else if (g.disk()) {
        const int c = g.center_cell();
        if (cls[c] == rc.cls && comp[c] < 0) {
          comp[c] = id;
          queue.push_back(c);
        }
      }
    }
    if (rc.has_center) rc.encircles = false;
    std::sort(rc.cells.begin(), rc.cells.end());
    out.push_back(std::move(rc));
  }
  return out;
}

// Interpolant samples at refined grid nodes, (n_s * factor + 1) rows.
struct NodeSamples {
  int nt = 0, ns = 0;
  double dtheta = 0, ds = 0;
  std::vector<double> v;
  double at(int a, int b) const { return v[static_cast<std::size_t>(b) * nt + ((a % nt) + nt) % nt]; }
};

NodeSamples node_samples(const SolutionField& f, int factor) {
  NodeSamples n;
  n.nt = f.layout().n_theta() * factor;
  n.ns = f.layout().n_s() * factor;
  n.dtheta = kTwoPi / n.nt;
  n.ds = 1.0 / n.ns;
  n.v.resize(static_cast<std::size_t>(n.ns + 1) * n.nt);
  for (int b = 0; b <= n.ns; ++b)
    for (int a = 0; a < n.nt; ++a) n.v[static_cast<std::size_t>(b) * n.nt + a] = f.value_ref(a * n.dtheta, b * n.ds);
  return n;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

double golden_extremum(const std::function<double(double)>& f, double lo, double hi, bool maximize, double& arg) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  auto g = [&](double x) { return maximize ? -f(x) : f(x); };
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 80 && b - a > 1e-14; ++it) {
    if (gc < gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + phi * (b - a);
      gd = g(d);
    }
  }
  arg = 0.5 * (a + b);
  return f(arg);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Cells within two refined cell diagonals of a point are left unclassified.
void exclude_near(const RefinedGrid& g, const std::vector<Point>& on_level, std::vector<signed char>& cls) {
  for (const Point& p : on_level) {
    const double radius = 2.0 * g.field().cell_diagonal(p) / g.factor();
    const RefCoord rc = g.field().domain().inverse(p, 1e-9);
    const int b0 = static_cast<int>(std::floor(rc.s * g.n_s()));
    const int wb = 8;
    for (int b = std::max(0, b0 - wb); b < std::min(g.n_s(), b0 + wb + 1); ++b)
      for (int a = 0; a < g.n_theta(); ++a) {
        const int c = g.cell(a, b);
        const Point q = g.center(c);
        if (std::hypot(q.x - p.x, q.y - p.y) <= radius) cls[c] = 0;
      }
    if (g.disk() && std::hypot(p.x, p.y) <= radius) cls[g.center_cell()] = 0;
  }
}

}  // namespace

RefinedGrid::RefinedGrid(const SolutionField& field, int factor)
    : field_(&field),
      factor_(factor),
      nt_(field.layout().n_theta() * factor),
      ns_(field.layout().n_s() * factor),
      disk_(field.layout().disk()),
      dtheta_(kTwoPi / nt_),
      ds_(1.0 / ns_) {
  values_.resize(static_cast<std::size_t>(cells()));
  for (int b = 0; b < ns_; ++b)
    for (int a = 0; a < nt_; ++a) values_[cell(a, b)] = field.value_ref(theta(a), s(b));
  if (disk_) values_[center_cell()] = field.value_ref(0.0, 0.0);
}

int RefinedGrid::cell(int a, int b) const { return b * nt_ + ((a % nt_) + nt_) % nt_; }

Point RefinedGrid::center(int c) const {
  if (disk_ && c == center_cell()) return {0.0, 0.0};
  return field_->domain().map(theta(col(c)), s(row(c)));
}

int LevelSetCensus::count(LevelSign sign, bool simply_connected_only, bool need_interior, bool need_exterior) const {
  int n = 0;
  for (const auto& c : components) {
    if (c.uncertain || c.sign != sign) continue;
    if (simply_connected_only && c.encircles_hole) continue;
    if (need_interior && !c.touches_interior) continue;
    if (need_exterior && !c.touches_exterior) continue;
    ++n;
  }
  return n;
}

LevelSetCensus level_census(const SolutionField& field, double t, int refine, const std::vector<Point>& on_level) {
  return level_census(RefinedGrid(field, refine), t, on_level);
}

LevelSetCensus level_census(const RefinedGrid& g, double t, const std::vector<Point>& on_level) {
  LevelSetCensus out;
  out.t = t;
  out.refine = g.factor();
  const double band = g.field().interpolation_error();
  std::vector<signed char> cls(g.cells());
  for (int c = 0; c < g.cells(); ++c) cls[c] = g.value(c) > t ? 1 : (g.value(c) < t ? -1 : 0);
  exclude_near(g, on_level, cls);
  int small = 0;
  for (RawComponent& rc : label_cells(g, cls)) {
    LevelComponent lc;
    lc.sign = rc.cls > 0 ? LevelSign::Super : LevelSign::Sub;
    lc.encircles_hole = rc.encircles;
    const bool super = lc.sign == LevelSign::Super;
    lc.extremal_value = super ? -INFINITY : INFINITY;
    lc.contact_extremal_value = lc.extremal_value;
    lc.uncertain = true;
    for (int c : rc.cells) {
      const double v = g.value(c);
      lc.uncertain = lc.uncertain && std::fabs(v - t) <= band;
      lc.extremal_value = super ? std::max(lc.extremal_value, v) : std::min(lc.extremal_value, v);
      if (g.disk() && c == g.center_cell()) continue;
      bool contact = false;
      if (!g.disk() && g.row(c) == 0) {
        lc.touches_interior = true;
        contact = true;
      }
      if (g.row(c) == g.n_s() - 1) {
        lc.touches_exterior = true;
        contact = true;
      }
      if (contact)
        lc.contact_extremal_value =
            super ? std::max(lc.contact_extremal_value, v) : std::min(lc.contact_extremal_value, v);
    }
    lc.cells = std::move(rc.cells);
    if (!lc.uncertain) {
      (super ? out.M1 : out.M2) += 1;
      if (lc.cells.size() < 4) ++small;
    }
    out.components.push_back(std::move(lc));
  }
  if (small > 0)
    out.warnings.push_back("ResolutionWarning: " + std::to_string(small) + " component(s) with fewer than 4 cells at t=" +
                           fmt(t));
  return out;
}

int interval_components(const RefinedGrid& g, double lo, double hi, const std::vector<Point>& on_level) {
  std::vector<signed char> cls(g.cells());
  for (int c = 0; c < g.cells(); ++c) cls[c] = g.value(c) > lo && g.value(c) < hi ? 1 : 0;
  exclude_near(g, on_level, cls);
  return static_cast<int>(label_cells(g, cls).size());
}

int cluster_critical_sets(const SolutionField& field, const std::vector<Point>& points, double t, int refine) {
  if (points.empty()) return 0;
  const NodeSamples n = node_samples(field, refine);
  // Points at "equal" critical values differ by up to equal_extrema_tol; the
  // band has to reach every one of them.
  double band = 2.0 * field.interpolation_error();
  for (const Point& p : points) band = std::max(band, 2.0 * std::fabs(field.evaluate(p) - t));
  const int nt = n.nt, ns = n.ns;
  std::vector<char> crossed(static_cast<std::size_t>(nt) * ns);
  auto id = [&](int a, int b) { return b * nt + ((a % nt) + nt) % nt; };
  for (int b = 0; b < ns; ++b)
    for (int a = 0; a < nt; ++a) {
      const double v[4] = {n.at(a, b), n.at(a + 1, b), n.at(a, b + 1), n.at(a + 1, b + 1)};
      const double lo = *std::min_element(v, v + 4), hi = *std::max_element(v, v + 4);
      crossed[id(a, b)] = lo - band <= t && t <= hi + band;
    }
  UnionFind uf(nt * ns);
  for (int b = 0; b < ns; ++b)
    for (int a = 0; a < nt; ++a) {
      if (!crossed[id(a, b)]) continue;
      if (crossed[id(a + 1, b)]) uf.unite(id(a, b), id(a + 1, b));
      if (b + 1 < ns && crossed[id(a, b + 1)]) uf.unite(id(a, b), id(a, b + 1));
    }
  // In a disk every ring-0 cell shares the center node.
  if (field.layout().disk() && std::fabs(n.at(0, 0) - t) <= std::max(band, 1e-12 * field.oscillation())) {
    int first = -1;
    for (int a = 0; a < nt; ++a) {
      if (!crossed[id(a, 0)]) continue;
      if (first < 0) first = id(a, 0);
      else uf.unite(first, id(a, 0));
    }
  }
  // The level set near a critical point is the star of arcs leaving it, but
  // those arcs can cross cell edges between same-signed corners. Join the
  // point's cell with every crossed cell within three refined cell diagonals.
  std::vector<int> roots;
  for (const Point& p : points) {
    const RefCoord rc = field.domain().inverse(p, 1e-9);
    const int a0 = static_cast<int>(std::floor(rc.theta / n.dtheta));
    const int b0 = std::clamp(static_cast<int>(std::floor(rc.s / n.ds)), 0, ns - 1);
    const int home = id(a0, b0);
    crossed[home] = 1;
    const double radius = 3.0 * field.cell_diagonal(p) / refine;
    for (int b = std::max(0, b0 - 12); b < std::min(ns, b0 + 13); ++b)
      for (int a = 0; a < nt; ++a) {
        if (!crossed[id(a, b)]) continue;
        const Point q = field.domain().map((a + 0.5) * n.dtheta, (b + 0.5) * n.ds);
        if (std::hypot(q.x - p.x, q.y - p.y) <= radius) uf.unite(home, id(a, b));
      }
  }
  for (const Point& p : points) {
    const RefCoord rc = field.domain().inverse(p, 1e-9);
    const int a0 = static_cast<int>(std::floor(rc.theta / n.dtheta));
    const int b0 = std::clamp(static_cast<int>(std::floor(rc.s / n.ds)), 0, ns - 1);
    roots.push_back(uf.find(id(a0, b0)));
  }
  std::sort(roots.begin(), roots.end());
  return static_cast<int>(std::unique(roots.begin(), roots.end()) - roots.begin());
}

int cluster_critical_sets(const SolutionField& field, const std::vector<Point>& points, double t) {
  const int coarse = cluster_critical_sets(field, points, t, 2);
  const int fine = cluster_critical_sets(field, points, t, 4);
  if (coarse != fine)
    throw BandTooWide("level set at t=" + fmt(t) + " forms " + std::to_string(coarse) + " cluster(s) at refinement 2 but " +
                      std::to_string(fine) + " at refinement 4");
  return fine;
}

LevelLines trace_level_lines(const SolutionField& field, double t, int refine) {
  LevelLines out;
  out.t = t;
  const NodeSamples n = node_samples(field, refine);
  const int nt = n.nt, ns = n.ns;
  const long long hkeys = static_cast<long long>(nt) * (ns + 1);
  auto hkey = [&](int a, int b) { return static_cast<long long>(b) * nt + ((a % nt) + nt) % nt; };
  auto vkey = [&](int a, int b) { return hkeys + static_cast<long long>(b) * nt + ((a % nt) + nt) % nt; };

  std::unordered_map<long long, Point> crossing;
  auto edge_point = [&](long long key) {
    auto it = crossing.find(key);
    if (it != crossing.end()) return it->second;
    const bool horizontal = key < hkeys;
    const long long k = horizontal ? key : key - hkeys;
    const int a = static_cast<int>(k % nt), b = static_cast<int>(k / nt);
    const double v0 = n.at(a, b);
    const double v1 = horizontal ? n.at(a + 1, b) : n.at(a, b + 1);
    const double w = v1 == v0 ? 0.5 : std::clamp((t - v0) / (v1 - v0), 0.0, 1.0);
    const double theta = (a + (horizontal ? w : 0.0)) * n.dtheta;
    const double s = (b + (horizontal ? 0.0 : w)) * n.ds;
    const Point p = field.domain().map(theta, s);
    crossing.emplace(key, p);
    return p;
  };

  std::vector<std::array<long long, 2>> segs;
  int saddles = 0;
  for (int b = 0; b < ns; ++b)
    for (int a = 0; a < nt; ++a) {
      const double v[4] = {n.at(a, b), n.at(a + 1, b), n.at(a + 1, b + 1), n.at(a, b + 1)};
      int idx = 0;
      for (int k = 0; k < 4; ++k)
        if (v[k] >= t) idx |= 1 << k;
      if (idx == 0 || idx == 15) continue;
      const long long e[4] = {hkey(a, b), vkey(a + 1, b), hkey(a, b + 1), vkey(a, b)};
      auto seg = [&](int p, int q) { segs.push_back({e[p], e[q]}); };
      switch (idx) {
        case 1: case 14: seg(3, 0); break;
        case 2: case 13: seg(0, 1); break;
        case 3: case 12: seg(3, 1); break;
        case 4: case 11: seg(1, 2); break;
        case 6: case 9: seg(0, 2); break;
        case 7: case 8: seg(3, 2); break;
        case 5: case 10: {
          ++saddles;
          const bool center_above = field.value_ref((a + 0.5) * n.dtheta, (b + 0.5) * n.ds) >= t;
          // Corners 0 and 2 joined through the center when they share its side.
          if ((idx == 5) == center_above) {
            seg(0, 1);
            seg(2, 3);
          } else {
            seg(3, 0);
            seg(1, 2);
          }
          break;
        }
        default: break;
      }
    }
  if (saddles > 0)
    out.warnings.push_back("ResolutionWarning: " + std::to_string(saddles) +
                           " saddle cell(s) resolved by the interpolant center value at t=" + fmt(t));

  std::unordered_map<long long, std::vector<int>> at_edge;
  for (int k = 0; k < static_cast<int>(segs.size()); ++k) {
    at_edge[segs[k][0]].push_back(k);
    at_edge[segs[k][1]].push_back(k);
  }
  std::vector<char> used(segs.size(), 0);
  auto walk = [&](int first, long long from) {
    Polyline line;
    line.points.push_back(edge_point(from));
    int seg = first;
    long long edge = from;
    while (seg >= 0) {
      used[seg] = 1;
      edge = segs[seg][0] == edge ? segs[seg][1] : segs[seg][0];
      line.points.push_back(edge_point(edge));
      if (edge == from) {
        line.closed = true;
        break;
      }
      seg = -1;
      for (int nxt : at_edge[edge])
        if (!used[nxt]) {
          seg = nxt;
          break;
        }
    }
    out.lines.push_back(std::move(line));
  };
  // Open lines start at an edge used by a single segment (a boundary edge).
  for (int k = 0; k < static_cast<int>(segs.size()); ++k) {
    if (used[k]) continue;
    for (long long e : segs[k])
      if (!used[k] && at_edge[e].size() == 1) walk(k, e);
  }
  for (int k = 0; k < static_cast<int>(segs.size()); ++k)
    if (!used[k]) walk(k, segs[k][0]);
  return out;
}

TraceProfile trace_profile(const std::function<double(double)>& psi, int samples, double equal_tol, double zero_tol) {
  TraceProfile out;
  const int n = samples;
  const double dt = kTwoPi / n;
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = psi(dt * k);
  out.min = *std::min_element(v.begin(), v.end());
  out.max = *std::max_element(v.begin(), v.end());
  const double range = out.max - out.min;
  if (range <= equal_tol * std::max({1.0, std::fabs(out.min), std::fabs(out.max)})) {
    out.degenerate = true;
    return out;
  }
  const double h = equal_tol * range;

  const int g = static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
  std::vector<int> max_idx{g}, min_idx;
  bool seeking_min = true;
  int cand = g;
  for (int k = 1; k < n; ++k) {
    const int i = (g + k) % n;
    if (seeking_min) {
      if (v[i] < v[cand]) cand = i;
      else if (v[i] > v[cand] + h) {
        min_idx.push_back(cand);
        seeking_min = false;
        cand = i;
      }
    } else {
      if (v[i] > v[cand]) cand = i;
      else if (v[i] < v[cand] - h) {
        max_idx.push_back(cand);
        seeking_min = true;
        cand = i;
      }
    }
  }
  if (seeking_min) min_idx.push_back(cand);

  auto refine = [&](int i, bool maximize) {
    TraceExtremum e;
    double arg = dt * i;
    e.value = golden_extremum(psi, dt * (i - 1), dt * (i + 1), maximize, arg);
    if (maximize ? e.value < v[i] : e.value > v[i]) {
      e.value = v[i];
      arg = dt * i;
    }
    e.theta = wrap_angle(arg);
    return e;
  };
  for (int i : max_idx) out.maxima.push_back(refine(i, true));
  for (int i : min_idx) out.minima.push_back(refine(i, false));
  auto by_theta = [](const TraceExtremum& a, const TraceExtremum& b) { return a.theta < b.theta; };
  std::sort(out.maxima.begin(), out.maxima.end(), by_theta);
  std::sort(out.minima.begin(), out.minima.end(), by_theta);
  for (const auto& e : out.maxima) out.max = std::max(out.max, e.value);
  for (const auto& e : out.minima) out.min = std::min(out.min, e.value);
  auto spread = [](const std::vector<TraceExtremum>& es) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& e : es) {
      lo = std::min(lo, e.value);
      hi = std::max(hi, e.value);
    }
    return hi - lo;
  };
  out.equal_maxima = spread(out.maxima) <= equal_tol * (out.max - out.min);
  out.equal_minima = spread(out.minima) <= equal_tol * (out.max - out.min);

  // Zeros: collapse runs with |psi| <= zero_tol; a run between opposite
  // signs is one crossing, between equal signs a tangential touch.
  auto sgn = [&](int i) { return v[i] > zero_tol ? 1 : (v[i] < -zero_tol ? -1 : 0); };
  int first = -1;
  for (int i = 0; i < n && first < 0; ++i)
    if (sgn(i) != 0) first = i;
  if (first < 0) return out;
  int last_sign = sgn(first), last_k = 0;
  for (int k = 1; k <= n; ++k) {
    const int i = (first + k) % n;
    const int s = sgn(i);
    if (s == 0) continue;
    const int gap = k - last_k - 1;
    const double start = dt * (first + last_k);
    double angle;
    if (gap == 0) {
      const double a = v[(first + last_k) % n], b = v[i];
      angle = start + dt * (a / (a - b));
    } else {
      angle = start + dt * 0.5 * (gap + 1);
    }
    if (s != last_sign) {
      ++out.sign_changes;
      out.zero_angles.push_back(wrap_angle(angle));
    } else if (gap > 0) {
      ++out.tangential_zeros;
    }
    last_sign = s;
    last_k = k;
  }
  // Touches that fall between samples show up only in the refined extrema.
  auto between_samples = [&](const std::vector<int>& idx, const std::vector<TraceExtremum>& refined) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const int i = idx[j];
      if (sgn(i) == 0 || sgn((i + 1) % n) != sgn(i) || sgn((i + n - 1) % n) != sgn(i)) continue;
      const auto e = std::find_if(refined.begin(), refined.end(), [&](const TraceExtremum& x) {
        return std::fabs(std::remainder(x.theta - dt * i, kTwoPi)) <= dt;
      });
      if (e != refined.end() && std::fabs(e->value) <= zero_tol) ++out.tangential_zeros;
    }
  };
  between_samples(min_idx, out.minima);
  between_samples(max_idx, out.maxima);
  std::sort(out.zero_angles.begin(), out.zero_angles.end());
  return out;
}

BoundaryProfile boundary_profile(const ScenarioSpec& spec, const SolutionField& field, int samples) {
  const ResolvedTolerances tol = resolve_tolerances(field);
  const double equal_tol = spec.tol.equal_extrema_tol;
  const double slack = equal_tol * tol.scale;
  const GridLayout& g = field.layout();

  // Closure-relative test against interpolant samples in a collar of depth
  // 5 grid cells along the boundary arc around the extremum.
  auto collar = [&](TraceProfile& tp, bool inner) {
    auto check = [&](TraceExtremum& e, bool is_max) {
      bool ok = true;
      for (int di = -10; di <= 10 && ok; ++di)
        for (int dj = 1; dj <= 10 && ok; ++dj) {
          const double theta = e.theta + 0.5 * di * g.h_theta();
          const double depth = 0.5 * dj * g.h_s();
          const double u = field.value_ref(theta, inner ? depth : 1.0 - depth);
          ok = is_max ? u <= e.value + slack : u >= e.value - slack;
        }
      e.relative_to_closure = ok;
    };
    for (auto& e : tp.maxima) check(e, true);
    for (auto& e : tp.minima) check(e, false);
  };

  BoundaryProfile out;
  if (spec.domain.is_annulus()) {
    out.interior = trace_profile([&](double th) { return spec.psi_interior_at(th); }, samples, equal_tol,
                                 tol.value_zero_tol);
    collar(*out.interior, true);
  }
  out.exterior =
      trace_profile([&](double th) { return spec.psi_exterior_at(th); }, samples, equal_tol, tol.value_zero_tol);
  collar(out.exterior, false);
  return out;
}

void require_nondegenerate(const TraceProfile& trace, const std::string& which) {
  if (trace.degenerate) throw DegenerateTrace(which + " boundary trace is constant; extremum counts are undefined");
}

OrderingCase ordering_case(const BoundaryProfile& p, double tol) {
  if (!p.interior || p.interior->degenerate || p.exterior.degenerate) return OrderingCase::Other;
  const double z1 = p.interior->min, Z1 = p.interior->max, z2 = p.exterior.min, Z2 = p.exterior.max;
  if (z1 < Z1 && Z1 <= z2 + tol && z2 < Z2) return OrderingCase::Separated;
  if (z1 < z2 && z2 < Z1 && Z1 < Z2) return OrderingCase::Overlapping;
  return OrderingCase::Other;
}

std::string to_string(OrderingCase c) {
  switch (c) {
    case OrderingCase::Separated: return "z1 < Z1 <= z2 < Z2";
    case OrderingCase::Overlapping: return "z1 < z2 < Z1 < Z2";
    default: return "other";
  }
}

bool ContactReport::holds() const {
  return std::all_of(checks.begin(), checks.end(), [](const ContactCheck& c) { return c.pass; });
}

ContactReport check_component_contact(const LevelSetCensus& census, const BoundaryProfile& profile, double tol) {
  ContactReport out;
  if (!profile.interior) {
    out.reason = "simply connected domain: no interior boundary";
    return out;
  }
  if (profile.interior->degenerate || profile.exterior.degenerate) {
    out.reason = "degenerate boundary trace";
    return out;
  }
  const double z1 = profile.interior->min, Z1 = profile.interior->max;
  const double z2 = profile.exterior.min, Z2 = profile.exterior.max;
  const double t = census.t;
  const OrderingCase oc = ordering_case(profile, tol);
  bool super_to_exterior = false, sub_to_interior = false;
  std::string super_clause, sub_clause;
  if (oc == OrderingCase::Separated) {
    super_to_exterior = t > z2 && t < Z2;
    sub_to_interior = t > z1 && t < Z1;
    super_clause = "super component meets gamma_E for t in (z2, Z2)";
    sub_clause = "sub component meets gamma_I for t in (z1, Z1)";
  } else if (oc == OrderingCase::Overlapping) {
    super_to_exterior = t >= Z1 && t < Z2;
    sub_to_interior = t > z1 && t <= z2;
    super_clause = "super component meets gamma_E for t in [Z1, Z2)";
    sub_clause = "sub component meets gamma_I for t in (z1, z2]";
  } else {
    out.reason = Z1 > z2 + tol ? "ordering case fails: Z1 > z2 and z1 < z2 < Z1 < Z2 does not hold"
                               : "ordering case fails: neither z1 < Z1 <= z2 < Z2 nor z1 < z2 < Z1 < Z2";
    return out;
  }
  if (!super_to_exterior && !sub_to_interior) {
    out.reason = "no contact clause constrains t=" + fmt(t) + " in case " + to_string(oc);
    return out;
  }
  out.applicable = true;
  for (int k = 0; k < static_cast<int>(census.components.size()); ++k) {
    const LevelComponent& c = census.components[k];
    if (c.uncertain) continue;
    if (super_to_exterior && c.sign == LevelSign::Super) out.checks.push_back({k, super_clause, c.touches_exterior});
    if (sub_to_interior && c.sign == LevelSign::Sub) out.checks.push_back({k, sub_clause, c.touches_interior});
  }
  return out;
}

LocalStructure local_structure(const SolutionField& field, Point p, double rho, const std::vector<Point>& others) {
  for (const Point& o : others) {
    const double d = std::hypot(o.x - p.x, o.y - p.y);
    if (d > 0 && d < rho)
      throw RadiusExhausted("critical point (" + fmt(o.x) + ", " + fmt(o.y) + ") lies within the local structure radius " +
                            fmt(rho) + " of (" + fmt(p.x) + ", " + fmt(p.y) + ")");
  }
  const int nr = 24, nphi = 720;
  std::vector<signed char> cls(static_cast<std::size_t>(nr) * nphi);
  double u0;
  try {
    u0 = field.evaluate(p);
    for (int i = 0; i < nr; ++i) {
      const double r = rho * (0.25 + 0.75 * i / (nr - 1));
      for (int k = 0; k < nphi; ++k) {
        const double phi = kTwoPi * k / nphi;
        const double u = field.evaluate({p.x + r * std::cos(phi), p.y + r * std::sin(phi)});
        cls[static_cast<std::size_t>(i) * nphi + k] = u > u0 ? 1 : -1;
      }
    }
  } catch (const OutsideDomain&) {
    throw RadiusExhausted("local structure annulus of radius " + fmt(rho) + " around (" + fmt(p.x) + ", " + fmt(p.y) +
                          ") leaves the domain");
  }
  std::vector<char> seen(cls.size(), 0);
  LocalStructure out;
  std::deque<int> queue;
  for (int start = 0; start < static_cast<int>(cls.size()); ++start) {
    if (seen[start]) continue;
    const signed char c = cls[start];
    (c > 0 ? out.supers : out.subs) += 1;
    seen[start] = 1;
    queue.push_back(start);
    while (!queue.empty()) {
      const int x = queue.front();
      queue.pop_front();
      const int i = x / nphi, k = x % nphi;
      const int nb[4] = {i * nphi + (k + 1) % nphi, i * nphi + (k + nphi - 1) % nphi, i > 0 ? x - nphi : -1,
                         i + 1 < nr ? x + nphi : -1};
      for (int y : nb)
        if (y >= 0 && !seen[y] && cls[y] == c) {
          seen[y] = 1;
          queue.push_back(y);
        }
    }
  }
  return out;
}

LocalStructure local_structure(const SolutionField& field, const CriticalPoint& cp, const std::vector<Point>& others) {
  return local_structure(field, cp.location, cp.degree_radius, others);
}

}  // namespace lslab
