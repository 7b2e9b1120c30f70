#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace houses {

enum class KernelKind { ard_se, relative_distance, houses };

std::string to_string(KernelKind kind);
KernelKind parse_kernel_kind(const std::string& s);

/// Covariance hyperparameters. `theta_k`, `gamma`, `alpha` and `beta` are
/// only read by the houses kernel.
struct KernelParams {
  KernelKind kind = KernelKind::ard_se;
  double theta_f = 1.0;               // amplitude of the location term
  double theta_k = 0.0;               // amplitude of the warped-separation term
  double theta_c = 1e-3;              // noise standard deviation
  std::vector<double> theta;          // per-dimension length scales
  std::vector<double> gamma;          // per-dimension length scales, second term
  std::vector<double> alpha;          // Kumaraswamy shapes
  std::vector<double> beta;

  static KernelParams defaults(KernelKind kind, std::size_t dim);

  std::size_t dim() const { return theta.size(); }
  /// Throws ArgumentError when sizes or signs are inconsistent with `kind`.
  void validate(std::size_t dim) const;
  bool operator==(const KernelParams&) const = default;
};

/// Location the non-stationary kernels measure relative distances from.
struct AnchorPoint {
  std::vector<double> s;
};

/// Kumaraswamy CDF 1 - (1 - u^alpha)^beta, evaluated without cancellation near 0.
double kumaraswamy_warp(double u, double alpha, double beta);

double kernel_ard_se(std::span<const double> x, std::span<const double> z, const KernelParams& params);
double kernel_relative_distance(std::span<const double> x, std::span<const double> z,
                                const KernelParams& params, const AnchorPoint& anchor);
double kernel_houses(std::span<const double> x, std::span<const double> z, const KernelParams& params,
                     const AnchorPoint& anchor);

/// Dispatches on params.kind. `anchor` is required by the non-stationary kinds.
double kernel(std::span<const double> x, std::span<const double> z, const KernelParams& params,
              const AnchorPoint* anchor);

/// Gram matrix over the rows of X.
Eigen::MatrixXd build_cov_matrix(const Eigen::MatrixXd& X, const KernelParams& params,
                                 const AnchorPoint* anchor);

// Every kernel here is a sum of terms amplitude * prod_d factor_d(x_d, z_d).
// Integrators use this to reduce D-dimensional averages to 1-D ones.
std::size_t kernel_term_count(KernelKind kind);
double kernel_term_amplitude(const KernelParams& params, std::size_t term);
double kernel_term_factor(const KernelParams& params, const AnchorPoint* anchor, std::size_t term,
                          std::size_t d, double x, double z);

/// Running count of relative-distance / houses kernel evaluations in this
/// process. Used to verify that stationary baselines never touch them.
std::uint64_t nonstationary_kernel_evaluations();
void count_nonstationary_evaluations(std::uint64_t n);

}  // namespace houses
