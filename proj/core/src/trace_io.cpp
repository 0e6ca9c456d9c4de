#include <odorsim/trace_io.hpp>

#include <fmt/format.h>

#include <charconv>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace odorsim::trace_io {

namespace {

void add_vector_columns(std::vector<std::string>& h, const std::string& base, int dim) {
  if (dim == 1) {
    h.push_back(base);
    return;
  }
  for (int k = 1; k <= dim; ++k) h.push_back(fmt::format("{}_{}", base, k));
}

void put(std::string& line, double v) {
  line += ',';
  line += fmt::format("{:.17g}", v);
}

void put_vec(std::string& line, const Vec& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) put(line, v[k]);
}

std::string json_vec(const Vec& v) {
  std::string s = "[";
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (k > 0) s += ',';
    s += fmt::format("{:.17g}", v[k]);
  }
  return s + "]";
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::vector<std::string> csv_header(int n_agents, int dim) {
  std::vector<std::string> h{"t"};
  for (int i = 1; i <= n_agents; ++i) {
    add_vector_columns(h, fmt::format("x{}", i), dim);
    add_vector_columns(h, fmt::format("u{}", i), dim);
    add_vector_columns(h, fmt::format("s{}", i), dim);
    h.push_back(fmt::format("V{}", i));
    h.push_back(fmt::format("eta{}", i));
    h.push_back(fmt::format("mode{}", i));
    add_vector_columns(h, fmt::format("psi{}", i), dim);
    h.push_back(fmt::format("e{}", i));
  }
  add_vector_columns(h, "ref", dim);
  for (const char* name : {"max_gap", "tracking_error", "distance_to_source", "disturbance", "leader"}) {
    h.emplace_back(name);
  }
  return h;
}

void write_csv(const sim::Trace& trace, std::ostream& out) {
  const auto header = csv_header(trace.n_agents, trace.dim);
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k > 0) out << ',';
    out << header[k];
  }
  out << '\n';
  std::string line;
  for (const auto& r : trace.records) {
    line = fmt::format("{:.17g}", r.t);
    for (const auto& a : r.agents) {
      put_vec(line, a.x);
      put_vec(line, a.u);
      put_vec(line, a.s);
      put(line, a.lyapunov);
      put(line, a.reachability);
      line += ',';
      line += planner::to_string(a.mode);
      put_vec(line, a.reference);
      put(line, a.error_norm);
    }
    put_vec(line, r.reference);
    put(line, r.max_gap);
    put(line, r.tracking_error);
    put(line, r.distance_to_source);
    put(line, r.disturbance_norm);
    line += fmt::format(",{}", r.leader + 1);
    out << line << '\n';
  }
}

void write_jsonl(const sim::Trace& trace, std::ostream& out) {
  for (const auto& r : trace.records) {
    std::string line = fmt::format("{{\"t\":{:.17g},\"agents\":[", r.t);
    for (std::size_t i = 0; i < r.agents.size(); ++i) {
      const auto& a = r.agents[i];
      if (i > 0) line += ',';
      line += fmt::format(
          "{{\"x\":{},\"u\":{},\"s\":{},\"V\":{:.17g},\"eta\":{:.17g},\"mode\":\"{}\","
          "\"psi\":{},\"e\":{:.17g},\"concentration\":{:.17g},\"detecting\":{}}}",
          json_vec(a.x), json_vec(a.u), json_vec(a.s), a.lyapunov, a.reachability,
          planner::to_string(a.mode), json_vec(a.reference), a.error_norm, a.concentration,
          a.detecting ? "true" : "false");
    }
    line += fmt::format(
        "],\"ref\":{},\"max_gap\":{:.17g},\"tracking_error\":{:.17g},"
        "\"distance_to_source\":{:.17g},\"disturbance\":{:.17g},\"leader\":{}}}",
        json_vec(r.reference), r.max_gap, r.tracking_error, r.distance_to_source,
        r.disturbance_norm, r.leader + 1);
    out << line << '\n';
  }
}

TraceTable TraceTable::read_csv(std::istream& in) {
  TraceTable t;
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw std::runtime_error("trace: missing header");
  t.header_ = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.header_.size()) {
      throw std::runtime_error(fmt::format("trace: line {} has {} cells, expected {}", lineno,
                                           cells.size(), t.header_.size()));
    }
    t.rows_.push_back(std::move(cells));
  }
  return t;
}

bool TraceTable::has_column(const std::string& name) const {
  for (const auto& h : header_) {
    if (h == name) return true;
  }
  return false;
}

std::size_t TraceTable::column_index(const std::string& name) const {
  for (std::size_t k = 0; k < header_.size(); ++k) {
    if (header_[k] == name) return k;
  }
  throw std::runtime_error("trace: no column named " + name);
}

std::vector<double> TraceTable::numeric_column(const std::string& name) const {
  const std::size_t c = column_index(name);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_) {
    const std::string& s = row[c];
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      // from_chars rejects "inf"/"nan" spellings produced by some writers.
      if (s == "inf") v = std::numeric_limits<double>::infinity();
      else if (s == "-inf") v = -std::numeric_limits<double>::infinity();
      else throw std::runtime_error("trace: column " + name + " holds non-numeric '" + s + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace odorsim::trace_io
