#pragma once

#include <algorithm>
#include <functional>
#include <numbers>
#include <tuple>
#include <vector>

#include "lslab/topology.hpp"

namespace lslab::oracle {

using Signature = std::tuple<int, bool, bool>;  // sign (+1/-1), touches I, touches E

// Direct flood fill over cell centers of a (n_theta*f) x (n_s*f) grid with
// the closed form evaluated exactly. Independent of RefinedGrid.
inline std::vector<Signature> brute_force_census(const DomainSpec& domain, const std::function<double(Point)>& exact,
                                                 GridSize g, int f, double t) {
  const int nt = g.n_theta * f, ns = g.n_s * f;
  std::vector<int> sign(nt * ns);
  for (int b = 0; b < ns; ++b)
    for (int a = 0; a < nt; ++a) {
      const Point p = domain.map(2 * std::numbers::pi * (a + 0.5) / nt, (b + 0.5) / ns);
      const double v = exact(p);
      sign[b * nt + a] = v > t ? 1 : (v < t ? -1 : 0);
    }
  std::vector<char> seen(nt * ns, 0);
  std::vector<Signature> out;
  for (int start = 0; start < nt * ns; ++start) {
    if (seen[start] || sign[start] == 0) continue;
    bool in = false, ex = false;
    std::vector<int> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      const int a = c % nt, b = c / nt;
      in |= b == 0;
      ex |= b == ns - 1;
      const int nb[4] = {b * nt + (a + 1) % nt, b * nt + (a + nt - 1) % nt, b + 1 < ns ? c + nt : -1,
                         b > 0 ? c - nt : -1};
      for (int y : nb)
        if (y >= 0 && !seen[y] && sign[y] == sign[start]) {
          seen[y] = 1;
          stack.push_back(y);
        }
    }
    out.emplace_back(sign[start], in, ex);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Signature> signatures(const LevelSetCensus& c) {
  std::vector<Signature> out;
  for (const auto& k : c.components)
    if (!k.uncertain) out.emplace_back(k.sign == LevelSign::Super ? 1 : -1, k.touches_interior, k.touches_exterior);
  std::sort(out.begin(), out.end());
  return out;
}

inline int count_sign(const std::vector<Signature>& s, int sign) {
  return static_cast<int>(std::count_if(s.begin(), s.end(), [&](const Signature& x) { return std::get<0>(x) == sign; }));
}

}  // namespace lslab::oracle
