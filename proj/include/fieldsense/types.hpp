#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>

namespace fieldsense {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Condition numbers above this mark an interpolation system as unusable.
inline constexpr double kConditionLimit = 1e12;

/// MSE value used for placements whose interpolation system is singular.
inline constexpr double kUninformative = std::numeric_limits<double>::infinity();

} // namespace fieldsense
