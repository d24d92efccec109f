#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qmas {

/// Minimal self-contained time-series plot: bands, polylines and horizontal
/// reference lines on a framed viewport. Output contains nothing
/// nondeterministic, so identical inputs give identical bytes.
struct Plot {
  struct Band {
    std::vector<double> x, lo, hi;
    std::string fill = "#d0e4f5";
    double opacity = 1.0;
  };
  struct Series {
    std::vector<double> x, y;
    std::string stroke = "#1f5fa8";
    double width = 1.5;
    bool dashed = false;
  };
  struct HLine {
    double y = 0.0;
    std::string stroke = "#333333";
    std::string label;
  };

  std::string title, x_label, y_label;
  std::vector<Band> bands;
  std::vector<Series> series;
  std::vector<HLine> hlines;
  int width = 860;
  int height = 520;
};

void write_svg(std::ostream& os, const Plot& plot);

}  // namespace qmas
