#pragma once

#include <odorsim/types.hpp>

#include <optional>
#include <span>

namespace odorsim::decision {

struct PsoParams {
  double alpha1 = 0.25;
  double alpha2 = 0.25;
  /// Inertia factor of the analysis-only PSO velocity update.
  double inertia_omega = 2.0;
  /// Weight of the PSO oscillation centre in the fused reference, in (0, 1).
  double c1 = 0.5;

  void validate() const;
};

struct ScoredPosition {
  Vec position;
  double score = 0.0;
};

struct NeighborReport {
  Vec position;
  double concentration = 0.0;
  double weight = 0.0;  ///< a(i, j)
};

struct DecisionState {
  std::optional<ScoredPosition> best_local;   ///< x_l
  std::optional<ScoredPosition> best_global;  ///< x_g, over neighbour reports
  std::optional<Vec> oscillation_center;      ///< p
  std::optional<Vec> wind_estimate;           ///< q
  std::optional<Vec> reference;               ///< psi
  double last_update = 0.0;
};

/// Best-so-far update. x_l competes with the own reading, x_g with the best
/// weighted neighbour score a_ij g(x_j). Strict improvement is required, so
/// the incumbent wins ties.
DecisionState update_bests(DecisionState d, const std::optional<ScoredPosition>& own,
                           std::span<const NeighborReport> neighbor_reports);

/// (alpha1 x_l + alpha2 x_g) / (alpha1 + alpha2). Throws if the weights sum to 0.
Vec oscillation_center(const Vec& best_local, const Vec& best_global,
                       const PsoParams& pp);

/// Proportional PSO law (alpha1 + alpha2)(p - x). Analysis and comparison only.
Vec pso_control(const Vec& center, const Vec& x, const PsoParams& pp);

/// Textbook two-term PSO law alpha1 (x_l - x) + alpha2 (x_g - x).
Vec pso_control_two_term(const Vec& best_local, const Vec& best_global,
                         const Vec& x, const PsoParams& pp);

/// v(k+1) = omega v(k) + u_pso(k).
Vec pso_velocity_update(const Vec& velocity, const Vec& control, const PsoParams& pp);

/// psi = c1 p + (1 - c1) q.
Vec fuse_reference(const Vec& center, const Vec& wind_estimate, double c1);

/// Recomputes p and psi from whatever of x_l, x_g, q is known. With only one
/// best, p is that best; with only one of p, q, psi is that one.
void refresh_reference(DecisionState& d, const PsoParams& pp);

}  // namespace odorsim::decision
