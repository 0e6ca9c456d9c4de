#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace odorsim {

/// Spatial vector (position, velocity, offset) of dimension d.
using Vec = Eigen::VectorXd;
/// Dense matrix; graph matrices are n x n.
using Mat = Eigen::MatrixXd;

/// Agent states, controls and errors are stacked agent-major: entry
/// (i * d + k) is component k of agent i.
inline Eigen::Index stacked_index(Eigen::Index agent, Eigen::Index component,
                                  Eigen::Index dim) {
  return agent * dim + component;
}

/// Raised when a non-finite value shows up in the closed loop.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace odorsim
