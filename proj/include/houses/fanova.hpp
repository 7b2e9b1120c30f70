#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace houses {

class GPModel;

using MeanFunction = std::function<double(std::span<const double>)>;

struct FanovaOptions {
  std::size_t grid_size = 20;
  std::size_t mc_samples = 512;
  std::uint64_t seed = 0;
};

/// Mean-centred marginal response of one dimension over a grid of [0,1].
struct MarginalCurve {
  std::size_t dimension = 0;
  std::vector<double> grid;
  std::vector<double> values;
};

/// Main-effect variance decomposition. importances sum to one.
struct ImportanceReport {
  double total_variance = 0.0;
  std::vector<double> variances;
  std::vector<double> importances;
  std::vector<MarginalCurve> curves;
};

/// Grid cell midpoints (i + 1/2) / G.
std::vector<double> fanova_grid(std::size_t grid_size);

/// N x D matrix of Sobol points with a random digital shift per dimension.
Eigen::MatrixXd scrambled_sobol(std::size_t dim, std::size_t n, std::uint64_t seed);

/// Averages `predictor` over the other coordinates (quasi-Monte Carlo) with
/// coordinate d pinned to each grid value, then subtracts the grid average.
MarginalCurve marginal_curve(const MeanFunction& predictor, std::size_t dim, std::size_t d,
                             const FanovaOptions& options = {});

ImportanceReport importance(const MeanFunction& predictor, std::size_t dim, const FanovaOptions& options = {});

/// Same estimator applied to the GP predictive mean, exploiting the
/// product form of the kernels so the D-1 dimensional averages are shared
/// across grid values. Agrees with the generic overload on predict_mean to
/// rounding error.
ImportanceReport importance(const GPModel& model, const FanovaOptions& options = {});

}  // namespace houses
