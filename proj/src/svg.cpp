#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace vaxsite::detail {

namespace {

constexpr double kWidth = 640.0;
constexpr double kPanelHeight = 170.0;
constexpr double kTop = 40.0;
constexpr double kLeft = 90.0;
constexpr double kRight = 20.0;
constexpr double kGap = 30.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::pair<double, double> range(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 1.0};
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (*hi - *lo < 1e-12 * std::max(1.0, std::abs(*hi))) return {*lo - 1.0, *hi + 1.0};
  return {*lo, *hi};
}

}  // namespace

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::vector<double>& x, const std::vector<ChartPanel>& panels) {
  const double plot_w = kWidth - kLeft - kRight;
  const double height = kTop + panels.size() * (kPanelHeight + kGap) + 30.0;
  const auto [x_lo, x_hi] = range(x);
  const auto px = [&](double v) { return kLeft + (v - x_lo) / (x_hi - x_lo) * plot_w; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
      << num(height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(title) << "</text>\n";

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto& panel = panels[p];
    const double top = kTop + p * (kPanelHeight + kGap);
    const double bottom = top + kPanelHeight;
    const auto [y_lo, y_hi] = range(panel.y);
    const auto py = [&](double v) { return bottom - (v - y_lo) / (y_hi - y_lo) * kPanelHeight; };

    out << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(top) << "\" width=\"" << num(plot_w)
        << "\" height=\"" << num(kPanelHeight) << "\" fill=\"none\" stroke=\"#888\"/>\n";
    out << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(top + 12)
        << "\" text-anchor=\"end\">" << num(y_hi) << "</text>\n";
    out << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(bottom)
        << "\" text-anchor=\"end\">" << num(y_lo) << "</text>\n";
    out << "<text x=\"" << num(kLeft + 6) << "\" y=\"" << num(top + 16) << "\">"
        << escape(panel.label) << "</text>\n";

    const auto count = std::min(x.size(), panel.y.size());
    if (count == 0) {
      out << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(top + kPanelHeight / 2)
          << "\" text-anchor=\"middle\" fill=\"#888\">no data</text>\n";
      continue;
    }
    out << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < count; ++i) {
      out << (i ? " " : "") << num(px(x[i])) << ',' << num(py(panel.y[i]));
    }
    out << "\"/>\n";
    for (std::size_t i = 0; i < count; ++i) {
      out << "<circle cx=\"" << num(px(x[i])) << "\" cy=\"" << num(py(panel.y[i]))
          << "\" r=\"3\" fill=\"#1f5fa8\"/>\n";
    }
    if (p + 1 == panels.size()) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        out << "<text x=\"" << num(px(x[i])) << "\" y=\"" << num(bottom + 16)
            << "\" text-anchor=\"middle\">" << num(x[i]) << "</text>\n";
      }
    }
  }
  out << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(height - 8)
      << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace vaxsite::detail
