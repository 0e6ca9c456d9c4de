#include <odorsim/decision.hpp>

#include <stdexcept>
#include <utility>

namespace odorsim::decision {

void PsoParams::validate() const {
  if (!(alpha1 > 0.0)) throw std::invalid_argument("decision.alpha1 must be > 0");
  if (!(alpha2 > 0.0)) throw std::invalid_argument("decision.alpha2 must be > 0");
  if (!(c1 > 0.0 && c1 < 1.0)) {
    throw std::invalid_argument("decision.c1 must lie strictly inside (0, 1)");
  }
}

DecisionState update_bests(DecisionState d, const std::optional<ScoredPosition>& own,
                           std::span<const NeighborReport> neighbor_reports) {
  if (own && (!d.best_local || own->score > d.best_local->score)) {
    d.best_local = own;
  }
  const NeighborReport* best = nullptr;
  double best_score = 0.0;
  for (const auto& r : neighbor_reports) {
    if (!(r.weight > 0.0)) continue;
    const double score = r.weight * r.concentration;
    if (best == nullptr || score > best_score) {
      best = &r;
      best_score = score;
    }
  }
  if (best != nullptr && (!d.best_global || best_score > d.best_global->score)) {
    d.best_global = ScoredPosition{best->position, best_score};
  }
  return d;
}

Vec oscillation_center(const Vec& best_local, const Vec& best_global,
                       const PsoParams& pp) {
  const double total = pp.alpha1 + pp.alpha2;
  if (total == 0.0) throw std::invalid_argument("alpha1 + alpha2 must be nonzero");
  return (pp.alpha1 * best_local + pp.alpha2 * best_global) / total;
}

Vec pso_control(const Vec& center, const Vec& x, const PsoParams& pp) {
  return (pp.alpha1 + pp.alpha2) * (center - x);
}

Vec pso_control_two_term(const Vec& best_local, const Vec& best_global,
                         const Vec& x, const PsoParams& pp) {
  return pp.alpha1 * (best_local - x) + pp.alpha2 * (best_global - x);
}

Vec pso_velocity_update(const Vec& velocity, const Vec& control, const PsoParams& pp) {
  return pp.inertia_omega * velocity + control;
}

Vec fuse_reference(const Vec& center, const Vec& wind_estimate, double c1) {
  return c1 * center + (1.0 - c1) * wind_estimate;
}

void refresh_reference(DecisionState& d, const PsoParams& pp) {
  if (d.best_local && d.best_global) {
    d.oscillation_center =
        oscillation_center(d.best_local->position, d.best_global->position, pp);
  } else if (d.best_local) {
    d.oscillation_center = d.best_local->position;
  } else if (d.best_global) {
    d.oscillation_center = d.best_global->position;
  }

  if (d.oscillation_center && d.wind_estimate) {
    d.reference = fuse_reference(*d.oscillation_center, *d.wind_estimate, pp.c1);
  } else if (d.oscillation_center) {
    d.reference = d.oscillation_center;
  } else if (d.wind_estimate) {
    d.reference = d.wind_estimate;
  }
}

}  // namespace odorsim::decision
