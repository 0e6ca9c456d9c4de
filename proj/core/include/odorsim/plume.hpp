#pragma once

#include <odorsim/rng.hpp>
#include <odorsim/types.hpp>

#include <optional>
#include <vector>

namespace odorsim::plume {

struct WindParams {
  Vec base_velocity;                      ///< nominal mean airflow (m/s)
  double max_speed = 1.0;                 ///< cap on |mean velocity|
  double noise_sigma = 0.0;               ///< intensity of the random increment n(t)
  double additive_amplitude = 0.0;        ///< additive gust (m/s) along base direction
  double multiplicative_amplitude = 0.0;  ///< relative modulation of base speed
  double gust_frequency = 0.5;            ///< Hz, shared by both disturbances
};

/// Mean airflow with additive and multiplicative perturbations,
///   v(t) = (1 + km sin(2 pi f t)) v0 + ka cos(2 pi f t) v0/|v0|,
/// clipped to |v(t)| <= max_speed.
class WindField {
 public:
  explicit WindField(WindParams params);

  Vec mean_velocity(double t) const;
  double noise_sigma() const { return params_.noise_sigma; }
  double max_speed() const { return params_.max_speed; }
  const WindParams& params() const { return params_; }

 private:
  WindParams params_;
};

struct Filament {
  Vec position;
  double release_time = 0.0;
  /// Sum of mean-wind displacements since release.
  Vec mean_drift;
};

struct PlumeState {
  Vec source_position;
  std::vector<Filament> filaments;
  double release_period = 0.1;
  double kernel_width = 0.5;
  double kernel_amplitude = 1.0;
};

/// Appends a filament at the source with zero drift.
PlumeState release_filament(PlumeState p, double t);

/// Euler-Maruyama advection of every filament over [t, t + dt]:
/// x += v(t) dt + sqrt(dt) sigma xi, drift += v(t) dt.
PlumeState step_filaments(PlumeState p, const WindField& wind, double t,
                          double dt, RandomStream& rng);

/// Sum of Gaussian kernels centred on the filaments; never negative.
double concentration_at(const PlumeState& p, const Vec& x);

/// Source estimate carried by a filament: position minus accumulated mean
/// drift, i.e. the true source plus the integrated noise.
Vec wind_source_estimate(const Filament& f);

/// Filament with the largest kernel contribution at x (ties: oldest).
std::optional<std::size_t> dominant_filament(const PlumeState& p, const Vec& x);

/// Drops filaments older than max_age at time t.
void prune_filaments(PlumeState& p, double t, double max_age);

/// Release schedule plus advection: keeps release times on the grid
/// k * release_period regardless of how the caller steps time.
class Plume {
 public:
  Plume(PlumeState initial, WindField wind, double max_age);

  /// Releases any filaments due in [t, t + dt) and advects to t + dt.
  void advance(double t, double dt, RandomStream& rng);

  const PlumeState& state() const { return state_; }
  const WindField& wind() const { return wind_; }

 private:
  PlumeState state_;
  WindField wind_;
  double max_age_;
  long long next_release_ = 0;
  double origin_ = 0.0;
  bool started_ = false;
};

}  // namespace odorsim::plume
