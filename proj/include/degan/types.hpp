#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <random>
#include <string>

namespace degan {

using Scalar = double;
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Rng = std::mt19937_64;

inline constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();

/// Decimal text with 17 significant digits; round-trips a double exactly.
std::string format_scalar(Scalar v);

/// Parses a decimal scalar, rejecting trailing garbage.
Scalar parse_scalar(const std::string& text);

} // namespace degan
