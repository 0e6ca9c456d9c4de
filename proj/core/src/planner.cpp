#include <odorsim/planner.hpp>

#include <stdexcept>

namespace odorsim::planner {

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Surging: return "surging";
    case Mode::Casting: return "casting";
    case Mode::Searching: return "searching";
  }
  return "unknown";
}

void PlannerParams::validate() const {
  if (!(delta0 > 0.0)) throw std::invalid_argument("planner.delta0 must be > 0");
  if (!(search_std >= 0.0)) throw std::invalid_argument("planner.search_std must be >= 0");
}

Mode classify_mode(bool own_detect, bool group_detect_any, double now,
                   const PlannerState& ps, const PlannerParams& params) {
  if (own_detect) return Mode::Surging;
  if (group_detect_any) return Mode::Casting;
  return (now - ps.last_detection_time) > params.delta0 ? Mode::Searching
                                                          : Mode::Casting;
}

Vec next_waypoint(Mode mode, const Vec& x, const PlannerState& ps,
                  const PlannerParams& params, RandomStream& rng) {
  const Vec& target = ps.predicted_source ? *ps.predicted_source : ps.waypoint;
  switch (mode) {
    case Mode::Surging:
      return target;
    case Mode::Casting:
      if (params.casting == CastingRule::Literal) {
        return (target.array() + (x - target).norm() / 2.0).matrix();
      }
      return (x + target) / 2.0;
    case Mode::Searching: {
      Vec w = target;
      for (Eigen::Index k = 0; k < w.size(); ++k) {
        w[k] += params.search_std > 0.0
                    ? rng.normal(params.search_mean, params.search_std)
                    : params.search_mean;
      }
      return w;
    }
  }
  return target;
}

}  // namespace odorsim::planner
