#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "houses/kernels.hpp"

namespace houses {

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

struct FitOptions {
  std::size_t starts = 8;
  // Centre and scale targets to unit variance before fitting; predictions are
  // mapped back to the original scale.
  bool standardize = true;
};

/// Box constraints of the log-space hyperparameter search.
struct HyperparameterBounds {
  static constexpr double length_lo = 1e-3, length_hi = 10.0;
  static constexpr double amplitude_lo = 1e-4, amplitude_hi = 10.0;
  static constexpr double noise_lo = 1e-6, noise_hi = 1.0;
  static constexpr double shape_lo = 0.1, shape_hi = 10.0;
};

/// Gaussian-process regression model over the unit cube. Immutable after
/// construction; predictions are safe to call concurrently.
class GPModel {
 public:
  /// Maximizes the log marginal likelihood over the kernel hyperparameters by
  /// multi-start coordinate search in log space, then factorizes.
  /// With a single observation the default hyperparameters are used.
  static GPModel fit(const Eigen::MatrixXd& X, std::span<const double> y, KernelKind kind,
                     std::optional<AnchorPoint> anchor, std::uint64_t seed,
                     const FitOptions& options = {});

  /// Factorizes with fixed hyperparameters.
  static GPModel build(const Eigen::MatrixXd& X, std::span<const double> y, const KernelParams& params,
                       std::optional<AnchorPoint> anchor, bool standardize = true);

  Prediction predict(std::span<const double> x) const;
  double predict_mean(std::span<const double> x) const;

  /// -1/2 t'w - sum(log diag L) - n/2 log(2 pi) on the fitted (standardized) targets t.
  double log_marginal_likelihood() const { return lml_; }

  std::size_t size() const { return static_cast<std::size_t>(X_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(X_.cols()); }
  const Eigen::MatrixXd& inputs() const { return X_; }
  const Eigen::VectorXd& targets() const { return y_; }
  /// Targets after centring/scaling; what the kernel actually models.
  Eigen::VectorXd fitted_targets() const { return (y_.array() - y_mean_) / y_scale_; }
  double target_mean() const { return y_mean_; }
  double target_scale() const { return y_scale_; }
  const KernelParams& params() const { return params_; }
  const std::optional<AnchorPoint>& anchor() const { return anchor_; }
  /// Lower Cholesky factor of K + (theta_c^2 + jitter) I.
  const Eigen::MatrixXd& factor() const { return L_; }
  /// (K + (theta_c^2 + jitter) I)^-1 t.
  const Eigen::VectorXd& weights() const { return w_; }
  double jitter() const { return jitter_; }

 private:
  GPModel() = default;
  void factorize();
  void precompute_features();
  void cross_covariance(std::span<const double> x, Eigen::VectorXd& k) const;

  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  KernelParams params_;
  std::optional<AnchorPoint> anchor_;
  Eigen::MatrixXd L_;
  Eigen::VectorXd w_;
  double jitter_ = 0.0;
  double lml_ = 0.0;
  // Per-row warped (or plain) distances to the anchor for the location term.
  Eigen::MatrixXd anchor_features_;
};

/// Log marginal likelihood of `targets` under fixed hyperparameters, with the
/// same jitter schedule as GPModel. Returns -inf if factorization fails.
double log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& targets,
                               const KernelParams& params, const AnchorPoint* anchor);

}  // namespace houses
