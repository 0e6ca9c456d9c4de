#include <odorsim/plume.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace odorsim::plume {

WindField::WindField(WindParams params) : params_(std::move(params)) {
  if (params_.base_velocity.size() == 0) {
    throw std::invalid_argument("wind base velocity must have a dimension");
  }
  if (!(params_.noise_sigma >= 0.0)) {
    throw std::invalid_argument("wind noise_sigma must be >= 0");
  }
  if (!(params_.max_speed > 0.0)) {
    throw std::invalid_argument("wind max_speed must be > 0");
  }
}

Vec WindField::mean_velocity(double t) const {
  const Vec& v0 = params_.base_velocity;
  const double phase = 2.0 * std::numbers::pi * params_.gust_frequency * t;
  Vec v = (1.0 + params_.multiplicative_amplitude * std::sin(phase)) * v0;
  const double speed0 = v0.norm();
  if (speed0 > 0.0) {
    v += params_.additive_amplitude * std::cos(phase) * (v0 / speed0);
  }
  const double speed = v.norm();
  if (speed > params_.max_speed) v *= params_.max_speed / speed;
  return v;
}

PlumeState release_filament(PlumeState p, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("release time must be >= 0");
  Filament f;
  f.position = p.source_position;
  f.release_time = t;
  f.mean_drift = Vec::Zero(p.source_position.size());
  p.filaments.push_back(std::move(f));
  return p;
}

PlumeState step_filaments(PlumeState p, const WindField& wind, double t,
                          double dt, RandomStream& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_filaments: dt must be > 0");
  const Vec drift = wind.mean_velocity(t) * dt;
  const double spread = std::sqrt(dt) * wind.noise_sigma();
  for (auto& f : p.filaments) {
    f.position += drift;
    f.mean_drift += drift;
    if (spread > 0.0) {
      for (Eigen::Index k = 0; k < f.position.size(); ++k) {
        f.position[k] += spread * rng.normal();
      }
    }
  }
  return p;
}

double concentration_at(const PlumeState& p, const Vec& x) {
  const double inv_two_var = 1.0 / (2.0 * p.kernel_width * p.kernel_width);
  double c = 0.0;
  for (const auto& f : p.filaments) {
    c += p.kernel_amplitude * std::exp(-(x - f.position).squaredNorm() * inv_two_var);
  }
  return c;
}

Vec wind_source_estimate(const Filament& f) { return f.position - f.mean_drift; }

std::optional<std::size_t> dominant_filament(const PlumeState& p, const Vec& x) {
  std::optional<std::size_t> best;
  double best_d2 = 0.0;
  for (std::size_t i = 0; i < p.filaments.size(); ++i) {
    const double d2 = (x - p.filaments[i].position).squaredNorm();
    if (!best || d2 < best_d2) {
      best = i;
      best_d2 = d2;
    }
  }
  return best;
}

void prune_filaments(PlumeState& p, double t, double max_age) {
  std::erase_if(p.filaments,
                [&](const Filament& f) { return t - f.release_time > max_age; });
}

Plume::Plume(PlumeState initial, WindField wind, double max_age)
    : state_(std::move(initial)), wind_(std::move(wind)), max_age_(max_age) {
  if (!(state_.release_period > 0.0)) {
    throw std::invalid_argument("plume release_period must be > 0");
  }
  if (!(state_.kernel_width > 0.0)) {
    throw std::invalid_argument("plume kernel_width must be > 0");
  }
  if (state_.kernel_amplitude < 0.0) {
    throw std::invalid_argument("plume kernel_amplitude must be >= 0");
  }
  if (wind_.params().base_velocity.size() != state_.source_position.size()) {
    throw std::invalid_argument("wind and source dimensions differ");
  }
}

void Plume::advance(double t, double dt, RandomStream& rng) {
  if (!started_) {
    origin_ = t;
    started_ = true;
  }
  // Release grid k * period from the first advance; the slack absorbs
  // rounding of t accumulated by callers.
  const double slack = 1e-9 * state_.release_period;
  while (static_cast<double>(next_release_) * state_.release_period <
         (t - origin_) + dt - slack) {
    const double tr = origin_ + static_cast<double>(next_release_) * state_.release_period;
    state_ = release_filament(std::move(state_), tr);
    ++next_release_;
  }
  state_ = step_filaments(std::move(state_), wind_, t, dt, rng);
  if (max_age_ > 0.0) prune_filaments(state_, t + dt, max_age_);
}

}  // namespace odorsim::plume
