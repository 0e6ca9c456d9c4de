#include <odorsim/sim.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace odorsim::sim {

ConsensusMetrics consensus_metrics(const Trace& trace, double tolerance) {
  const auto& recs = trace.records;
  if (recs.empty()) throw std::invalid_argument("consensus_metrics: empty trace");

  ConsensusMetrics m;
  std::size_t settle = 0;
  bool settled = true;
  for (std::size_t k = recs.size(); k-- > 0;) {
    if (recs[k].max_gap >= tolerance) {
      settled = k + 1 < recs.size();
      settle = k + 1;
      break;
    }
  }
  m.time_to_consensus =
      settled ? recs[settle].t : std::numeric_limits<double>::infinity();

  const auto& last = recs.back();
  m.final_max_gap = last.max_gap;
  m.final_tracking_error = last.tracking_error;
  m.final_distance_to_source = last.distance_to_source;

  for (std::size_t k = 0; k < recs.size(); ++k) {
    for (const auto& a : recs[k].agents) {
      m.max_abs_s = std::max(m.max_abs_s, a.s.cwiseAbs().maxCoeff());
      if (k + 1 < recs.size()) m.control_energy += a.u.norm() * trace.dt;
    }
  }

  const std::size_t tail_begin =
      std::max<std::size_t>(1, recs.size() - recs.size() / 5);
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t k = tail_begin; k < recs.size(); ++k) {
    for (std::size_t i = 0; i < recs[k].agents.size(); ++i) {
      const Vec du = recs[k].agents[i].u - recs[k - 1].agents[i].u;
      total += du.cwiseAbs().sum();
      count += static_cast<std::size_t>(du.size());
    }
  }
  m.chattering_index = count > 0 ? total / static_cast<double>(count) : 0.0;
  return m;
}

}  // namespace odorsim::sim
