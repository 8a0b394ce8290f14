#include "lslab/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "lslab/topology.hpp"

namespace lslab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kPlot = 560;
constexpr int kMargin = 20;
constexpr int kLegend = 200;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

std::string f3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return std::string(buf) == "-0.000" ? "0.000" : buf;
}

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// "--" is not allowed inside XML comments.
std::string comment_safe(std::string s) {
  for (std::size_t k; (k = s.find("--")) != std::string::npos;) s.replace(k, 2, "- -");
  return s;
}

}  // namespace

std::string render_svg(const SolutionField& field, const std::vector<double>& thresholds,
                       const std::vector<CriticalPoint>& points, int refine) {
  const DomainSpec& dom = field.domain();
  double extent = 0;
  for (int k = 0; k < 720; ++k) extent = std::max(extent, dom.outer_radius(kTwoPi * k / 720));
  const double scale = 0.5 * kPlot / extent;
  auto px = [&](Point p) { return f3(kMargin + 0.5 * kPlot + scale * p.x) + "," + f3(kMargin + 0.5 * kPlot - scale * p.y); };

  std::ostringstream out;
  const int width = kPlot + 2 * kMargin + kLegend, height = kPlot + 2 * kMargin;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  auto curve = [&](const char* cls, auto radius) {
    out << "<polygon class=\"" << cls << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
    for (int k = 0; k < 720; ++k) {
      const double th = kTwoPi * k / 720;
      const double r = radius(th);
      out << (k ? " " : "") << px({r * std::cos(th), r * std::sin(th)});
    }
    out << "\"/>\n";
  };
  curve("boundary exterior", [&](double th) { return dom.outer_radius(th); });
  if (dom.is_annulus()) curve("boundary interior", [&](double th) { return dom.inner_radius(th); });

  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    const LevelLines lines = trace_level_lines(field, thresholds[k], refine);
    for (const auto& w : lines.warnings) out << "<!-- " << comment_safe(w) << " -->\n";
    const char* color = kPalette[k % std::size(kPalette)];
    out << "<g class=\"level\" data-t=\"" << g6(thresholds[k]) << "\" stroke=\"" << color
        << "\" fill=\"none\" stroke-width=\"1\">\n";
    for (const auto& l : lines.lines) {
      out << "<polyline points=\"";
      for (std::size_t j = 0; j < l.points.size(); ++j) out << (j ? " " : "") << px(l.points[j]);
      if (l.closed && !l.points.empty()) out << " " << px(l.points.front());
      out << "\"/>\n";
    }
    out << "</g>\n";
  }

  for (const auto& p : points)
    out << "<circle class=\"critical\" cx=\"" << f3(kMargin + 0.5 * kPlot + scale * p.location.x) << "\" cy=\""
        << f3(kMargin + 0.5 * kPlot - scale * p.location.y) << "\" r=\"" << 2 + 2 * p.multiplicity
        << "\" fill=\"" << (p.is_zero ? "black" : "white") << "\" stroke=\"black\" data-m=\"" << p.multiplicity
        << "\"/>\n";

  const int lx = kPlot + 2 * kMargin;
  out << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  int y = kMargin + 12;
  for (std::size_t k = 0; k < thresholds.size(); ++k, y += 18) {
    out << "<line x1=\"" << lx << "\" y1=\"" << y - 4 << "\" x2=\"" << lx + 24 << "\" y2=\"" << y - 4
        << "\" stroke=\"" << kPalette[k % std::size(kPalette)] << "\" stroke-width=\"2\"/>";
    out << "<text x=\"" << lx + 30 << "\" y=\"" << y << "\">u = " << g6(thresholds[k]) << "</text>\n";
  }
  out << "<circle cx=\"" << lx + 12 << "\" cy=\"" << y - 4 << "\" r=\"4\" fill=\"white\" stroke=\"black\"/>";
  out << "<text x=\"" << lx + 30 << "\" y=\"" << y << "\">critical point (size ~ m)</text>\n";
  y += 18;
  out << "<circle cx=\"" << lx + 12 << "\" cy=\"" << y - 4 << "\" r=\"4\" fill=\"black\" stroke=\"black\"/>";
  out << "<text x=\"" << lx + 30 << "\" y=\"" << y << "\">critical zero point</text>\n";
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace lslab
