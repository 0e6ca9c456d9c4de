#include <odorsim/plot.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace odorsim::plot {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

constexpr std::array<const char*, 8> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

// Columns whose name is `prefix` followed by an agent number, optionally
// with a _k component suffix.
std::vector<std::string> agent_columns(const trace_io::TraceTable& trace, const std::string& prefix) {
  std::vector<std::string> out;
  for (const auto& h : trace.header()) {
    if (h.size() <= prefix.size() || h.compare(0, prefix.size(), prefix) != 0) continue;
    const std::string rest = h.substr(prefix.size());
    if (!std::isdigit(static_cast<unsigned char>(rest.front()))) continue;
    bool ok = true;
    for (char c : rest) ok = ok && (std::isdigit(static_cast<unsigned char>(c)) || c == '_');
    if (ok) out.push_back(h);
  }
  return out;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<Figure> parse_figure_selector(std::string_view selector) {
  if (selector == "all") {
    return {Figure::States, Figure::ErrorNorm, Figure::Controls, Figure::Manifolds};
  }
  if (selector == "states") return {Figure::States};
  if (selector == "error") return {Figure::ErrorNorm};
  if (selector == "controls") return {Figure::Controls};
  if (selector == "manifolds") return {Figure::Manifolds};
  throw std::invalid_argument("unknown figure selector '" + std::string(selector) +
                              "' (expected all, states, error, controls or manifolds)");
}

std::string file_name(Figure f) {
  switch (f) {
    case Figure::States: return "fig_states.svg";
    case Figure::ErrorNorm: return "fig_error_norm.svg";
    case Figure::Controls: return "fig_controls.svg";
    case Figure::Manifolds: return "fig_manifolds.svg";
  }
  return "fig.svg";
}

FigureData extract_figure(const trace_io::TraceTable& trace, Figure f, double lambda1) {
  FigureData fig;
  std::string prefix;
  switch (f) {
    case Figure::States:
      fig.title = "Agent states";
      fig.y_label = "x";
      prefix = "x";
      break;
    case Figure::ErrorNorm:
      fig.title = "Norm of tracking errors";
      fig.y_label = "|e|";
      prefix = "e";
      break;
    case Figure::Controls:
      fig.title = "Control signals";
      fig.y_label = "u";
      prefix = "u";
      break;
    case Figure::Manifolds:
      fig.title = "Sliding manifolds";
      fig.y_label = "s";
      prefix = "s";
      fig.guides = {lambda1, -lambda1};
      break;
  }
  const auto t = trace.numeric_column("t");
  for (const auto& col : agent_columns(trace, prefix)) {
    fig.series.push_back(Series{col, t, trace.numeric_column(col)});
  }
  if (fig.series.empty()) throw std::runtime_error("trace has no '" + prefix + "' columns");
  return fig;
}

std::string render_svg(const FigureData& fig) {
  double t0 = std::numeric_limits<double>::infinity();
  double t1 = -t0;
  double y0 = t0;
  double y1 = -t0;
  for (const auto& s : fig.series) {
    for (double v : s.t) {
      t0 = std::min(t0, v);
      t1 = std::max(t1, v);
    }
    for (double v : s.y) {
      if (!std::isfinite(v)) continue;
      y0 = std::min(y0, v);
      y1 = std::max(y1, v);
    }
  }
  for (double g : fig.guides) {
    y0 = std::min(y0, g);
    y1 = std::max(y1, g);
  }
  if (!(t1 > t0)) t1 = t0 + 1.0;
  if (!(y1 > y0)) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double t) { return kLeft + (t - t0) / (t1 - t0) * pw; };
  auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">{3}</text>\n"
      "<rect x=\"{4}\" y=\"{5}\" width=\"{6}\" height=\"{7}\" fill=\"none\" stroke=\"black\"/>\n",
      kWidth, kHeight, kLeft + pw / 2.0, escape(fig.title), kLeft, kTop, pw, ph);

  for (int k = 0; k <= 5; ++k) {
    const double tv = t0 + (t1 - t0) * k / 5.0;
    const double yv = y0 + (y1 - y0) * k / 5.0;
    out += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:.3g}</text>\n", px(tv),
        kTop + ph + 18.0, tv);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.3g}</text>\n",
                       kLeft - 6.0, py(yv) + 4.0, yv);
  }
  out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">t (s)</text>\n",
                     kLeft + pw / 2.0, kHeight - 10.0);
  out += fmt::format(
      "<text x=\"16\" y=\"{:.2f}\" transform=\"rotate(-90 16 {:.2f})\" "
      "text-anchor=\"middle\">{}</text>\n",
      kTop + ph / 2.0, kTop + ph / 2.0, escape(fig.y_label));

  for (double g : fig.guides) {
    out += fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"gray\" "
        "stroke-dasharray=\"6 4\"/>\n",
        kLeft, py(g), kLeft + pw, py(g));
  }
  for (std::size_t i = 0; i < fig.series.size(); ++i) {
    const auto& s = fig.series[i];
    const char* color = kPalette[i % kPalette.size()];
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\" points=\"", color);
    for (std::size_t k = 0; k < s.t.size(); ++k) {
      if (!std::isfinite(s.y[k])) continue;
      out += fmt::format("{:.2f},{:.2f} ", px(s.t[k]), py(s.y[k]));
    }
    out += "\"/>\n";
    const double ly = kTop + 14.0 + 18.0 * static_cast<double>(i);
    out += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"{3}\" "
        "stroke-width=\"2\"/><text x=\"{4:.2f}\" y=\"{5:.2f}\">{6}</text>\n",
        kLeft + pw + 10.0, ly, kLeft + pw + 30.0, color, kLeft + pw + 36.0, ly + 4.0,
        escape(s.label));
  }
  out += "</svg>\n";
  return out;
}

}  // namespace odorsim::plot
