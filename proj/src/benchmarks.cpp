#include "houses/benchmarks.hpp"

#include <cmath>
#include <numbers>

#include "houses/errors.hpp"

namespace houses::bench {

double sphere(std::span<const double> u) {
  double s = 0.0;
  for (double v : u) s += (v - 0.5) * (v - 0.5);
  return s;
}

double branin(std::span<const double> u) {
  if (u.size() != 2) throw ArgumentError("branin is two-dimensional");
  constexpr double pi = std::numbers::pi;
  const double x1 = -5.0 + 15.0 * u[0];
  const double x2 = 15.0 * u[1];
  const double b = 5.1 / (4.0 * pi * pi);
  const double c = 5.0 / pi;
  const double t = 1.0 / (8.0 * pi);
  const double q = x2 - b * x1 * x1 + c * x1 - 6.0;
  return q * q + 10.0 * (1.0 - t) * std::cos(x1) + 10.0;
}

double hartmann6(std::span<const double> u) {
  if (u.size() != 6) throw ArgumentError("hartmann6 is six-dimensional");
  static constexpr double alpha[4] = {1.0, 1.2, 3.0, 3.2};
  static constexpr double A[4][6] = {{10, 3, 17, 3.5, 1.7, 8},
                                     {0.05, 10, 17, 0.1, 8, 14},
                                     {3, 3.5, 1.7, 10, 17, 8},
                                     {17, 8, 0.05, 10, 0.1, 14}};
  static constexpr double P[4][6] = {{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                                     {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                                     {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                                     {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};
  double outer = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < 6; ++j) inner += A[i][j] * (u[j] - P[i][j]) * (u[j] - P[i][j]);
    outer += alpha[i] * std::exp(-inner);
  }
  return -outer;
}

double rastrigin(std::span<const double> u) {
  double s = 10.0 * static_cast<double>(u.size());
  for (double v : u) {
    const double x = -5.12 + 10.24 * v;
    s += x * x - 10.0 * std::cos(2.0 * std::numbers::pi * x);
  }
  return s;
}

}  // namespace houses::bench
