#pragma once

#include <span>

namespace houses::bench {

// Synthetic test functions, all taking unit-cube coordinates and all minimized.

/// sum_d (u_d - 1/2)^2; minimum 0 at the centre. Any dimension.
double sphere(std::span<const double> u);

/// Branin-Hoo on x1 in [-5, 10], x2 in [0, 15]; minimum 0.397887 at three points.
double branin(std::span<const double> u);

/// Six-dimensional Hartmann on [0,1]^6; minimum -3.32237.
double hartmann6(std::span<const double> u);

/// Rastrigin on [-5.12, 5.12]^D; minimum 0 at the centre. Any dimension.
double rastrigin(std::span<const double> u);

inline constexpr double kBraninMinimum = 0.397887357729738;
inline constexpr double kHartmann6Minimum = -3.32236801141551;

}  // namespace houses::bench
