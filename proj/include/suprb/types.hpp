#pragma once

#include <Eigen/Dense>

namespace suprb {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

} // namespace suprb
