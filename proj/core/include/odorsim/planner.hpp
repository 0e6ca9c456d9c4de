#pragma once

#include <odorsim/rng.hpp>
#include <odorsim/types.hpp>

#include <optional>
#include <string_view>

namespace odorsim::planner {

enum class Mode { Surging, Casting, Searching };

std::string_view to_string(Mode m);

/// How a casting waypoint is formed.
///  Midpoint: (x + x_hat) / 2.
///  Literal:  |x - x_hat| / 2 + x_hat, the norm added to every component.
enum class CastingRule { Midpoint, Literal };

struct PlannerParams {
  double delta0 = 5.0;      ///< group no-detection timeout (s)
  double search_mean = 0.0; ///< phi, per axis
  double search_std = 1.0;  ///< sigma, per axis
  CastingRule casting = CastingRule::Midpoint;

  void validate() const;
};

struct PlannerState {
  Mode mode = Mode::Casting;
  /// Last time any agent of the group detected odour.
  double last_detection_time = 0.0;
  std::optional<Vec> predicted_source;
  Vec waypoint;
};

/// Surging on own detection; otherwise Casting until the group has gone
/// longer than delta0 without a detection, then Searching.
Mode classify_mode(bool own_detect, bool group_detect_any, double now,
                   const PlannerState& ps, const PlannerParams& params);

/// Waypoint for the given mode. Without a predicted source the current
/// waypoint stands in for it.
Vec next_waypoint(Mode mode, const Vec& x, const PlannerState& ps,
                  const PlannerParams& params, RandomStream& rng);

}  // namespace odorsim::planner
