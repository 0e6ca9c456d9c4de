#include <odorsim/plot.hpp>
#include <odorsim/scenario.hpp>
#include <odorsim/trace_io.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace odorsim;

namespace {

trace_io::TraceTable small_table(sim::Trace* keep = nullptr) {
  const auto cfg =
      scenario::load_scenario(*scenario::canned_scenario("paper_consensus"), {"time.t_end=0.2"})
          .config;
  const auto trace = sim::run_scenario(cfg);
  std::ostringstream os;
  trace_io::write_csv(trace, os);
  std::istringstream is(os.str());
  if (keep) *keep = trace;
  return trace_io::TraceTable::read_csv(is);
}

}  // namespace

TEST(TraceIo, HeaderOrder) {
  const auto h = trace_io::csv_header(2, 1);
  const std::vector<std::string> expect{
      "t",  "x1",  "u1",   "s1",  "V1",  "eta1", "mode1",   "psi1",           "e1",
      "x2", "u2",  "s2",   "V2",  "eta2", "mode2", "psi2",  "e2",             "ref",
      "max_gap", "tracking_error", "distance_to_source", "disturbance", "leader"};
  EXPECT_EQ(h, expect);
  const auto h2 = trace_io::csv_header(1, 2);
  EXPECT_EQ(h2[1], "x1_1");
  EXPECT_EQ(h2[2], "x1_2");
}

TEST(TraceIo, CsvRoundTripsExactly) {
  sim::Trace trace;
  const auto table = small_table(&trace);
  ASSERT_EQ(table.rows(), trace.records.size());
  const auto x1 = table.numeric_column("x1");
  const auto e3 = table.numeric_column("e3");
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    EXPECT_EQ(x1[k], trace.records[k].agents[0].x(0));
    EXPECT_EQ(e3[k], trace.records[k].agents[2].error_norm);
  }
  EXPECT_THROW(table.column_index("bogus"), std::runtime_error);
}

TEST(TraceIo, JsonLinesOnePerRecord) {
  const auto cfg =
      scenario::load_scenario(*scenario::canned_scenario("paper_consensus"), {"time.t_end=0.05"})
          .config;
  const auto trace = sim::run_scenario(cfg);
  std::ostringstream os;
  trace_io::write_jsonl(trace, os);
  const std::string text = os.str();
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')),
            trace.records.size());
}

TEST(Plot, Selector) {
  EXPECT_EQ(plot::parse_figure_selector("all").size(), 4u);
  EXPECT_EQ(plot::parse_figure_selector("error").front(), plot::Figure::ErrorNorm);
  EXPECT_THROW(plot::parse_figure_selector("fig7"), std::invalid_argument);
}

TEST(Plot, ErrorNormIsPassedThrough) {
  const auto table = small_table();
  const auto fig = plot::extract_figure(table, plot::Figure::ErrorNorm, 1.774);
  ASSERT_EQ(fig.series.size(), 4u);
  EXPECT_EQ(fig.series[1].y, table.numeric_column("e2"));
  EXPECT_EQ(fig.series[1].t, table.numeric_column("t"));
}

TEST(Plot, ManifoldGuidesAtEnvelope) {
  const auto table = small_table();
  const auto fig = plot::extract_figure(table, plot::Figure::Manifolds, 1.774);
  ASSERT_EQ(fig.guides.size(), 2u);
  EXPECT_EQ(*std::min_element(fig.guides.begin(), fig.guides.end()), -1.774);
  EXPECT_EQ(*std::max_element(fig.guides.begin(), fig.guides.end()), 1.774);
  for (const auto& s : fig.series) {
    for (double y : s.y) EXPECT_LE(std::abs(y), 1.774);
  }
  const auto svg = plot::render_svg(fig);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
}
