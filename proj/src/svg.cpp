#include "qmas/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace qmas {

namespace {

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void absorb(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void pad() {
    if (!(lo < hi)) {
      lo -= 1.0;
      hi += 1.0;
    }
    const double margin = 0.05 * (hi - lo);
    lo -= margin;
    hi += margin;
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

void write_svg(std::ostream& os, const Plot& plot) {
  const double ml = 64, mr = 20, mt = 34, mb = 46;
  const double vw = plot.width - ml - mr;
  const double vh = plot.height - mt - mb;

  Range rx, ry;
  for (const auto& b : plot.bands) {
    for (double v : b.x) rx.absorb(v);
    for (double v : b.lo) ry.absorb(v);
    for (double v : b.hi) ry.absorb(v);
  }
  for (const auto& s : plot.series) {
    for (double v : s.x) rx.absorb(v);
    for (double v : s.y) ry.absorb(v);
  }
  for (const auto& h : plot.hlines) ry.absorb(h.y);
  ry.absorb(0.0);
  rx.pad();
  ry.pad();

  auto px = [&](double v) { return ml + (v - rx.lo) / (rx.hi - rx.lo) * vw; };
  auto py = [&](double v) { return mt + vh - (v - ry.lo) / (ry.hi - ry.lo) * vh; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width << "\" height=\""
     << plot.height << "\" viewBox=\"0 0 " << plot.width << " " << plot.height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // grid and ticks
  const int n_ticks = 6;
  os << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#444444\">\n";
  for (int t = 0; t <= n_ticks; ++t) {
    const double fx = rx.lo + (rx.hi - rx.lo) * t / n_ticks;
    const double fy = ry.lo + (ry.hi - ry.lo) * t / n_ticks;
    os << "<line x1=\"" << num(px(fx)) << "\" y1=\"" << num(mt) << "\" x2=\"" << num(px(fx))
       << "\" y2=\"" << num(mt + vh) << "\" stroke=\"#eeeeee\"/>\n";
    os << "<line x1=\"" << num(ml) << "\" y1=\"" << num(py(fy)) << "\" x2=\"" << num(ml + vw)
       << "\" y2=\"" << num(py(fy)) << "\" stroke=\"#eeeeee\"/>\n";
    os << "<text x=\"" << num(px(fx)) << "\" y=\"" << num(mt + vh + 18)
       << "\" text-anchor=\"middle\">" << tick_label(fx) << "</text>\n";
    os << "<text x=\"" << num(ml - 8) << "\" y=\"" << num(py(fy) + 4)
       << "\" text-anchor=\"end\">" << tick_label(fy) << "</text>\n";
  }
  os << "</g>\n";

  for (const auto& b : plot.bands) {
    if (b.x.empty()) continue;
    os << "<path fill=\"" << b.fill << "\" fill-opacity=\"" << num(b.opacity) << "\" stroke=\"none\" d=\"M";
    for (size_t i = 0; i < b.x.size(); ++i) {
      os << num(px(b.x[i])) << " " << num(py(b.lo[i])) << (i + 1 < b.x.size() ? " L" : " ");
    }
    for (size_t i = b.x.size(); i-- > 0;) {
      os << "L" << num(px(b.x[i])) << " " << num(py(b.hi[i])) << " ";
    }
    os << "Z\"/>\n";
  }

  for (const auto& s : plot.series) {
    if (s.x.empty()) continue;
    os << "<polyline fill=\"none\" stroke=\"" << s.stroke << "\" stroke-width=\"" << num(s.width) << "\"";
    if (s.dashed) os << " stroke-dasharray=\"6 4\"";
    os << " points=\"";
    for (size_t i = 0; i < s.x.size(); ++i) {
      os << num(px(s.x[i])) << "," << num(py(s.y[i])) << (i + 1 < s.x.size() ? " " : "");
    }
    os << "\"/>\n";
  }

  for (const auto& h : plot.hlines) {
    os << "<line x1=\"" << num(ml) << "\" y1=\"" << num(py(h.y)) << "\" x2=\"" << num(ml + vw)
       << "\" y2=\"" << num(py(h.y)) << "\" stroke=\"" << h.stroke
       << "\" stroke-width=\"1.5\" stroke-dasharray=\"8 5\"/>\n";
    if (!h.label.empty()) {
      os << "<text x=\"" << num(ml + vw - 4) << "\" y=\"" << num(py(h.y) - 6)
         << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << h.stroke
         << "\">" << h.label << "</text>\n";
    }
  }

  os << "<rect x=\"" << num(ml) << "\" y=\"" << num(mt) << "\" width=\"" << num(vw) << "\" height=\""
     << num(vh) << "\" fill=\"none\" stroke=\"#222222\"/>\n";
  os << "<text x=\"" << num(ml + vw / 2) << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"15\">" << plot.title << "</text>\n";
  os << "<text x=\"" << num(ml + vw / 2) << "\" y=\"" << num(plot.height - 10)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << plot.x_label
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << num(mt + vh / 2)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 16 "
     << num(mt + vh / 2) << ")\">" << plot.y_label << "</text>\n";
  os << "</svg>\n";
}

}  // namespace qmas
