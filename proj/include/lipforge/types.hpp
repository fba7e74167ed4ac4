#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>

namespace lipforge {

// Small dense vectors/matrices with a compile-time capacity bound so hot
// evaluation loops never touch the heap. Domains are d >= 2, targets D >= 1,
// both small in practice.
inline constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace lipforge
