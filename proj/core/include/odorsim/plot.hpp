#pragma once

#include <odorsim/trace_io.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace odorsim::plot {

enum class Figure { States, ErrorNorm, Controls, Manifolds };

/// "all", "states", "error", "controls" or "manifolds". Throws
/// std::invalid_argument for anything else.
std::vector<Figure> parse_figure_selector(std::string_view selector);

std::string file_name(Figure f);

struct Series {
  std::string label;
  std::vector<double> t;
  std::vector<double> y;
};

struct FigureData {
  std::string title;
  std::string y_label;
  std::vector<Series> series;
  /// Horizontal reference lines (drawn dashed), e.g. +-lambda1.
  std::vector<double> guides;
};

/// Pulls the plotted columns straight out of the trace; no resampling.
FigureData extract_figure(const trace_io::TraceTable& trace, Figure f, double lambda1);

/// Static SVG line plot.
std::string render_svg(const FigureData& fig);

}  // namespace odorsim::plot
