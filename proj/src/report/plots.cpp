#include "sockaudit/report/plots.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

namespace sockaudit::report {
namespace {

constexpr double kWidth = 720, kHeight = 400;
constexpr double kLeft = 60, kRight = 170, kTop = 40, kBottom = 50;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                "#9467bd", "#8c564b", "#e377c2", "#000000"};

struct Line {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

std::string chart(const std::vector<Line>& lines, const std::string& title, double y_lo,
                  double y_hi, long boundary) {
  double x_hi = 1;
  for (const auto& l : lines) {
    for (const auto& [x, _] : l.points) x_hi = std::max(x_hi, x);
  }
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + pw * x / x_hi; };
  auto sy = [&](double y) { return kTop + ph * (y_hi - y) / (y_hi - y_lo); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(title) << "</text>\n";
  // Axes and grid.
  for (int i = 0; i <= 4; ++i) {
    const double y = y_lo + (y_hi - y_lo) * i / 4.0;
    o << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + pw << "\" y1=\"" << sy(y) << "\" y2=\""
      << sy(y) << "\" stroke=\"#ddd\"/>\n"
      << "<text x=\"" << kLeft - 6 << "\" y=\"" << sy(y) + 4 << "\" text-anchor=\"end\">"
      << format_number(y, 2) << "</text>\n";
  }
  const long step = x_hi > 40 ? 10 : x_hi > 10 ? 5 : 1;
  for (long x = 0; x <= static_cast<long>(x_hi); x += step) {
    o << "<text x=\"" << sx(static_cast<double>(x)) << "\" y=\"" << kTop + ph + 16
      << "\" text-anchor=\"middle\">" << x << "</text>\n";
  }
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12
    << "\" text-anchor=\"middle\">watched videos</text>\n"
    << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"#444\"/>\n";
  if (boundary > 0) {
    const double bx = sx(static_cast<double>(boundary));
    o << "<line x1=\"" << bx << "\" x2=\"" << bx << "\" y1=\"" << kTop << "\" y2=\"" << kTop + ph
      << "\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : lines[i].points) o << sx(x) << ',' << sy(y) << ' ';
    o << "\"/>\n";
    const double ly = kTop + 14.0 * static_cast<double>(i) + 6;
    o << "<line x1=\"" << kLeft + pw + 12 << "\" x2=\"" << kLeft + pw + 32 << "\" y1=\"" << ly
      << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
      << "<text x=\"" << kLeft + pw + 36 << "\" y=\"" << ly + 4 << "\">" << escape(lines[i].label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace

std::string series_svg(std::span<const SeriesRow> rows, const std::string& title,
                       long phase_boundary) {
  std::vector<Line> lines;
  std::map<std::string, std::size_t> index;
  for (const auto& r : rows) {
    auto [it, added] = index.emplace(r.scope, lines.size());
    if (added) lines.push_back({r.scope, {}});
    lines[it->second].points.emplace_back(static_cast<double>(r.watch_index), r.score);
  }
  return chart(lines, title, -1.0, 1.0, phase_boundary);
}

std::string proportions_svg(std::span<const ProportionRow> rows, const std::string& scope,
                            const std::string& title, long phase_boundary) {
  std::vector<Line> lines{{"promoting", {}}, {"neutral", {}}, {"debunking", {}}};
  for (const auto& r : rows) {
    if (r.scope != scope) continue;
    const double total = static_cast<double>(r.total());
    if (total == 0.0) continue;
    const double x = static_cast<double>(r.share.watch_index);
    lines[0].points.emplace_back(x, static_cast<double>(r.share.promoting) / total);
    lines[1].points.emplace_back(x, static_cast<double>(r.share.neutral) / total);
    lines[2].points.emplace_back(x, static_cast<double>(r.share.debunking) / total);
  }
  return chart(lines, title, 0.0, 1.0, phase_boundary);
}

}  // namespace sockaudit::report
