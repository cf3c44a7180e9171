#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace urysohn::cli {

namespace {

constexpr double kWidth = 700, kHeight = 440;
constexpr double kLeft = 80, kRight = 200, kTop = 40, kBottom = 60;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

std::string decade_label(int e) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "1e%d", e);
  return buf;
}

} // namespace

std::string loglog_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (auto [x, y] : s.points)
      if (x > 0 && y > 0) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
  if (!std::isfinite(xmin)) {
    xmin = ymin = 0.1;
    xmax = ymax = 1.0;
  }
  // whole decades around the data
  const int x0 = static_cast<int>(std::floor(std::log10(xmin))), x1 = std::max(x0 + 1, static_cast<int>(std::ceil(std::log10(xmax))));
  const int y0 = static_cast<int>(std::floor(std::log10(ymin))), y1 = std::max(y0 + 1, static_cast<int>(std::ceil(std::log10(ymax))));
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (std::log10(x) - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + ph - (std::log10(y) - y0) / (y1 - y0) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
    << "</text>\n";

  o << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (int e = x0; e <= x1; ++e)
    o << "<line x1=\"" << num(px(std::pow(10.0, e))) << "\" y1=\"" << num(kTop) << "\" x2=\""
      << num(px(std::pow(10.0, e))) << "\" y2=\"" << num(kTop + ph) << "\"/>\n";
  for (int e = y0; e <= y1; ++e)
    o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py(std::pow(10.0, e))) << "\" x2=\"" << num(kLeft + pw)
      << "\" y2=\"" << num(py(std::pow(10.0, e))) << "\"/>\n";
  o << "</g>\n";
  o << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int e = x0; e <= x1; ++e)
    o << "<text x=\"" << num(px(std::pow(10.0, e))) << "\" y=\"" << num(kTop + ph + 18)
      << "\" text-anchor=\"middle\">" << decade_label(e) << "</text>\n";
  for (int e = y0; e <= y1; ++e)
    o << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py(std::pow(10.0, e)) + 4)
      << "\" text-anchor=\"end\">" << decade_label(e) << "</text>\n";
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 16) << "\" text-anchor=\"middle\">"
    << escape(x_label) << "</text>\n";
  o << "<text transform=\"translate(20," << num(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(y_label) << "</text>\n";

  double legend_y = kTop + 10;
  for (const auto& s : series) {
    std::string pts;
    for (auto [x, y] : s.points)
      if (x > 0 && y > 0)
        pts += num(px(x)) + "," + num(py(y)) + " ";
    if (!pts.empty()) {
      pts.pop_back();
      o << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"2\""
        << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"" << pts << "\"/>\n";
      for (auto [x, y] : s.points)
        if (x > 0 && y > 0)
          o << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"3\" fill=\"" << s.colour
            << "\"/>\n";
    }
    const double lx = kLeft + pw + 12;
    o << "<line x1=\"" << num(lx) << "\" y1=\"" << num(legend_y) << "\" x2=\"" << num(lx + 24) << "\" y2=\""
      << num(legend_y) << "\" stroke=\"" << s.colour << "\" stroke-width=\"2\""
      << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
    o << "<text x=\"" << num(lx + 30) << "\" y=\"" << num(legend_y + 4) << "\">" << escape(s.label) << "</text>\n";
    legend_y += 20;
  }
  o << "</svg>\n";
  return o.str();
}

} // namespace urysohn::cli
