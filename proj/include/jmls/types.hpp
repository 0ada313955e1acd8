#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace jmls {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised when a numerical routine cannot proceed (non-PD matrix after jitter,
/// filter degeneracy, ...). Precondition violations use std::invalid_argument.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace jmls
