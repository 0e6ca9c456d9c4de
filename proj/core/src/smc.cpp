#include <odorsim/smc.hpp>

#include <odorsim/graph.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace odorsim::smc {

namespace {

using RowMajorMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// View a stacked agent-major vector as an n x d matrix (one row per agent).
Eigen::Map<const RowMajorMat> as_agents(const Vec& v, Eigen::Index n, Eigen::Index d) {
  return Eigen::Map<const RowMajorMat>(v.data(), n, d);
}

Vec apply_kron(const Mat& m, const Vec& v, int dim) {
  if (v.size() != m.cols() * dim) {
    throw std::invalid_argument("stacked vector has " + std::to_string(v.size()) +
                                " entries, expected " +
                                std::to_string(m.cols() * dim));
  }
  RowMajorMat out = m * as_agents(v, m.cols(), dim);
  return Eigen::Map<const Vec>(out.data(), out.size());
}

double sign_or_layer(double s, double boundary_layer) {
  if (boundary_layer > 0.0) return std::tanh(s / boundary_layer);
  return static_cast<double>((s > 0.0) - (s < 0.0));
}

}  // namespace

void SmcParams::validate() const {
  if (!(lambda1 > 0.0)) throw std::invalid_argument("smc.lambda1 must be > 0");
  if (!(lambda2 > 0.0)) throw std::invalid_argument("smc.lambda2 must be > 0");
  if (!(mu > 0.0)) throw std::invalid_argument("smc.mu must be > 0");
  if (!(m_offset > 0.0)) throw std::invalid_argument("smc.m_offset must be > 0");
  if (!(w_gain > 0.0)) throw std::invalid_argument("smc.w_gain must be > 0");
  if (!(boundary_layer >= 0.0)) {
    throw std::invalid_argument("smc.boundary_layer must be >= 0");
  }
}

Vec topological_error(const Mat& coupling, const Vec& error, int dim) {
  if (coupling.rows() != coupling.cols()) {
    throw std::invalid_argument("coupling matrix must be square");
  }
  if (dim <= 0) throw std::invalid_argument("dimension must be positive");
  return apply_kron(coupling, error, dim);
}

Vec sliding_value(const Vec& eps, const SmcParams& p) {
  return (p.lambda2 * eps.array()).tanh() * p.lambda1;
}

Vec reaching_rate(const Vec& s, const SmcParams& p) {
  Vec r(s.size());
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    r[k] = -p.mu * std::asinh(p.m_offset + p.w_gain * std::abs(s[k])) *
           sign_or_layer(s[k], p.boundary_layer);
  }
  return r;
}

Vec gamma_factor(const Vec& eps, const SmcParams& p, int* floored) {
  Vec g(eps.size());
  int hits = 0;
  for (Eigen::Index k = 0; k < eps.size(); ++k) {
    const double c = std::cosh(p.lambda2 * eps[k]);
    double v = 1.0 / (c * c);
    if (!(v >= kGammaFloor)) {
      v = kGammaFloor;
      ++hits;
    }
    g[k] = v;
  }
  if (floored != nullptr) *floored = hits;
  return g;
}

SlidingModeController::SlidingModeController(Mat coupling, int dim, SmcParams params)
    : coupling_(std::move(coupling)), dim_(dim), params_(params) {
  params_.validate();
  if (dim_ <= 0) throw std::invalid_argument("dimension must be positive");
  if (coupling_.rows() == 0 || coupling_.rows() != coupling_.cols()) {
    throw std::invalid_argument("coupling matrix must be square and non-empty");
  }
  if (graph::matrix_rank(coupling_) != coupling_.rows()) {
    throw std::invalid_argument(
        "H = L + B is singular; the topology needs a spanning tree rooted at the leader");
  }
  coupling_inverse_ = coupling_.partialPivLu().inverse();
}

Vec SlidingModeController::lift(const Vec& v) const {
  return apply_kron(coupling_, v, dim_);
}

Vec SlidingModeController::solve(const Vec& v) const {
  return apply_kron(coupling_inverse_, v, dim_);
}

void SlidingModeController::check_input(const ControlInput& in) const {
  const Eigen::Index size = coupling_.rows() * dim_;
  if (in.state.size() != size || in.reference.size() != size ||
      in.reference_rate.size() != size || in.drift.size() != size) {
    throw std::invalid_argument("control input vectors must have n * d entries");
  }
}

ControlOutput SlidingModeController::continuous(const ControlInput& in) const {
  check_input(in);
  ControlOutput out;
  out.eps = lift(in.state - in.reference);
  out.s = sliding_value(out.eps, params_);
  const Vec gamma = gamma_factor(out.eps, params_, &out.gamma_floor_hits);
  const Vec drive = -reaching_rate(out.s, params_).cwiseQuotient(gamma) /
                    params_.big_lambda();
  out.control = -solve(drive) - in.drift + in.reference_rate;
  return out;
}

ControlOutput SlidingModeController::sampled(const ControlInput& in, double dt) const {
  check_input(in);
  if (!(dt > 0.0)) throw std::invalid_argument("sampled control needs dt > 0");
  ControlOutput out;
  out.eps = lift(in.state - in.reference);
  out.s = sliding_value(out.eps, params_);
  const Vec s_next = out.s + dt * reaching_rate(out.s, params_);
  // Largest double strictly below 1 keeps atanh finite.
  const double edge = std::nextafter(1.0, 0.0);
  Vec deps(out.eps.size());
  for (Eigen::Index k = 0; k < deps.size(); ++k) {
    const double ratio = std::clamp(s_next[k] / params_.lambda1, -edge, edge);
    deps[k] = (std::atanh(ratio) - params_.lambda2 * out.eps[k]) / params_.lambda2;
  }
  out.control = solve(deps / dt) - in.drift + in.reference_rate;
  return out;
}

Vec control_law(const ControlInput& in, const Mat& coupling, int dim,
                const SmcParams& p) {
  return SlidingModeController(coupling, dim, p).continuous(in).control;
}

Vec reachability_margin(const Vec& s, const Vec& gamma, const Vec& coupled_disturbance,
                        int dim, const SmcParams& p) {
  const Eigen::Index n = s.size() / dim;
  Vec eta(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto si = s.segment(i * dim, dim);
    const Vec push = p.big_lambda() * gamma.segment(i * dim, dim)
                                          .cwiseProduct(coupled_disturbance.segment(i * dim, dim));
    eta[i] = p.mu * std::asinh(p.m_offset + p.w_gain * si.norm()) - push.norm();
  }
  return eta;
}

GainReport gain_check(const SmcParams& p, const Mat& coupling, double disturbance_bound,
                      EpsilonRange eps_range) {
  if (!std::isfinite(disturbance_bound) || disturbance_bound < 0.0) {
    throw std::invalid_argument("disturbance bound must be finite and >= 0");
  }
  GainReport r;
  r.disturbance_bound = disturbance_bound;
  r.w_margin = p.w_gain - disturbance_bound;
  r.w_condition = r.w_margin > 0.0;
  r.coupling_norm = p.big_lambda() * coupling.cwiseAbs().rowwise().sum().maxCoeff();
  const double c = std::cosh(p.lambda2 * eps_range.min_abs);
  r.gamma_sup = 1.0 / (c * c);
  const double worst = r.coupling_norm * disturbance_bound * r.gamma_sup;
  r.mu_margin = p.mu - worst;
  r.mu_condition = r.mu_margin > 0.0;
  r.certified_radius = std::max(0.0, (std::sinh(1.0) - p.m_offset) / p.w_gain);
  r.ultimate_bound = std::max(0.0, (std::sinh(worst / p.mu) - p.m_offset) / p.w_gain);
  return r;
}

}  // namespace odorsim::smc
