#pragma once

#include <odorsim/types.hpp>

#include <limits>

namespace odorsim::smc {

struct SmcParams {
  double lambda1 = 1.774;   ///< manifold amplitude
  double lambda2 = 2.85;    ///< manifold slope
  double mu = 5.0;          ///< reaching gain
  double m_offset = 1e-3;   ///< keeps the asinh argument off zero
  double w_gain = 2.0;      ///< reaching-law gain
  double boundary_layer = 0.0;  ///< 0: pure sign; >0: sign(s) -> tanh(s / width)

  void validate() const;
  double big_lambda() const { return lambda1 * lambda2; }
};

inline constexpr double kGammaFloor = 1e-300;

/// epsilon = (H (x) I_d) e.
Vec topological_error(const Mat& coupling, const Vec& error, int dim);

/// s = lambda1 tanh(lambda2 epsilon), componentwise.
Vec sliding_value(const Vec& eps, const SmcParams& p);

/// Commanded sdot = -mu asinh(m + w|s|) sign(s), sign(0) = 0.
Vec reaching_rate(const Vec& s, const SmcParams& p);

/// Gamma = 1 - tanh^2(lambda2 epsilon) evaluated as sech^2, floored at
/// kGammaFloor. `floored` counts entries that hit the floor.
Vec gamma_factor(const Vec& eps, const SmcParams& p, int* floored = nullptr);

struct ControlInput {
  Vec state;           ///< stacked x
  Vec reference;       ///< stacked per-agent reference (psi, plus formation offset)
  Vec reference_rate;  ///< stacked psi-dot
  Vec drift;           ///< stacked nominal drift f(x, t)
};

struct ControlOutput {
  Vec control;
  Vec eps;
  Vec s;
  int gamma_floor_hits = 0;
};

/// Distributed sliding-mode tracking law over a fixed coupling matrix
/// H = L + B, lifted to d spatial components as H (x) I_d.
class SlidingModeController {
 public:
  /// Throws std::invalid_argument if H is singular or params are invalid.
  SlidingModeController(Mat coupling, int dim, SmcParams params);

  /// u = -(Lambda H)^{-1} [mu asinh(m + w|s|) sign(s) / Gamma] - f + psi_dot.
  /// In closed loop without disturbance this gives sdot = reaching_rate(s).
  ControlOutput continuous(const ControlInput& in) const;

  /// Sampled-data form of the same law: picks u so that one explicit Euler
  /// step of length dt moves s exactly to s + dt * reaching_rate(s), i.e.
  /// epsilon is driven to atanh(s_next / lambda1) / lambda2. Agrees with
  /// continuous() as dt -> 0 but never divides by Gamma, so it stays finite
  /// when tanh is saturated.
  ControlOutput sampled(const ControlInput& in, double dt) const;

  /// (H (x) I_d) v
  Vec lift(const Vec& v) const;
  /// (H (x) I_d)^{-1} v
  Vec solve(const Vec& v) const;

  int n_agents() const { return static_cast<int>(coupling_.rows()); }
  int dim() const { return dim_; }
  const Mat& coupling() const { return coupling_; }
  const SmcParams& params() const { return params_; }

 private:
  void check_input(const ControlInput& in) const;

  Mat coupling_;
  Mat coupling_inverse_;
  int dim_;
  SmcParams params_;
};

/// One-shot convenience wrapper around SlidingModeController::continuous.
Vec control_law(const ControlInput& in, const Mat& coupling, int dim,
                const SmcParams& p);

/// Per-agent reachability margin
///   eta_i = mu asinh(m + w |s_i|) - |Lambda Gamma_i (H sigma)_i|,
/// norms taken over the d components of agent i.
Vec reachability_margin(const Vec& s, const Vec& gamma, const Vec& coupled_disturbance,
                        int dim, const SmcParams& p);

struct EpsilonRange {
  double min_abs = 0.0;
  double max_abs = std::numeric_limits<double>::infinity();
};

struct GainReport {
  double disturbance_bound = 0.0;
  bool w_condition = false;   ///< w > sigma_max
  double w_margin = 0.0;      ///< w - sigma_max
  double coupling_norm = 0.0; ///< ||Lambda H||_inf
  double gamma_sup = 1.0;     ///< sup Gamma over the epsilon range
  bool mu_condition = false;  ///< mu > ||Lambda H||_inf sigma_max gamma_sup
  double mu_margin = 0.0;
  /// |s| beyond which asinh(m + w|s|) >= 1, so that mu alone bounds the
  /// disturbance term; inside it the mu condition certifies nothing.
  double certified_radius = 0.0;
  /// Largest |s| at which mu asinh(m + w|s|) can still be matched by the
  /// worst-case disturbance term; attractivity holds outside it.
  double ultimate_bound = 0.0;

  bool passes() const { return w_condition && mu_condition; }
};

GainReport gain_check(const SmcParams& p, const Mat& coupling, double disturbance_bound,
                      EpsilonRange eps_range = {});

}  // namespace odorsim::smc
