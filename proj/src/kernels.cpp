#include "houses/kernels.hpp"

#include <atomic>
#include <cmath>

#include "houses/errors.hpp"

namespace houses {

namespace {

std::atomic<std::uint64_t> g_nonstationary_evals{0};

void check_dims(std::span<const double> x, std::span<const double> z, const KernelParams& params) {
  if (x.size() != z.size() || x.size() != params.theta.size()) {
    throw ArgumentError("kernel: dimension mismatch (" + std::to_string(x.size()) + ", " +
                        std::to_string(z.size()) + ", params " + std::to_string(params.theta.size()) +
                        ")");
  }
}

void check_anchor(const AnchorPoint& anchor, std::size_t dim) {
  if (anchor.s.size() != dim) throw ArgumentError("kernel: anchor dimension mismatch");
}

void check_positive(const std::vector<double>& v, std::size_t dim, const char* what) {
  if (v.size() != dim) throw ArgumentError(std::string("kernel params: '") + what + "' has wrong size");
  for (double x : v) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw ArgumentError(std::string("kernel params: '") + what + "' must be positive");
    }
  }
}

}  // namespace

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::ard_se: return "ard";
    case KernelKind::relative_distance: return "relative";
    case KernelKind::houses: return "houses";
  }
  return "?";
}

KernelKind parse_kernel_kind(const std::string& s) {
  if (s == "ard" || s == "ard_se") return KernelKind::ard_se;
  if (s == "relative" || s == "relative_distance") return KernelKind::relative_distance;
  if (s == "houses") return KernelKind::houses;
  throw ArgumentError("unknown kernel '" + s + "'");
}

KernelParams KernelParams::defaults(KernelKind kind, std::size_t dim) {
  KernelParams p;
  p.kind = kind;
  p.theta_f = 1.0;
  p.theta_c = 1e-3;
  p.theta.assign(dim, 0.3);
  if (kind == KernelKind::houses) {
    p.theta_k = 0.5;
    p.gamma.assign(dim, 0.3);
    p.alpha.assign(dim, 1.0);
    p.beta.assign(dim, 1.0);
  }
  return p;
}

void KernelParams::validate(std::size_t d) const {
  if (!(theta_f >= 0.0) || !(theta_c >= 0.0) || !std::isfinite(theta_f) || !std::isfinite(theta_c)) {
    throw ArgumentError("kernel params: amplitudes and noise must be finite and >= 0");
  }
  check_positive(theta, d, "theta");
  if (kind == KernelKind::houses) {
    if (!(theta_k >= 0.0) || !std::isfinite(theta_k)) {
      throw ArgumentError("kernel params: theta_k must be finite and >= 0");
    }
    check_positive(gamma, d, "gamma");
    check_positive(alpha, d, "alpha");
    check_positive(beta, d, "beta");
  }
}

double kumaraswamy_warp(double u, double alpha, double beta) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError("kumaraswamy_warp: input " + std::to_string(u) + " outside [0, 1]");
  }
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  if (alpha == 1.0 && beta == 1.0) return u;
  return -std::expm1(beta * std::log1p(-std::pow(u, alpha)));
}

double kernel_ard_se(std::span<const double> x, std::span<const double> z, const KernelParams& params) {
  check_dims(x, z, params);
  double e = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double diff = x[d] - z[d];
    e -= diff * diff / (2.0 * params.theta[d] * params.theta[d]);
  }
  return params.theta_f * std::exp(e);
}

double kernel_relative_distance(std::span<const double> x, std::span<const double> z,
                                const KernelParams& params, const AnchorPoint& anchor) {
  check_dims(x, z, params);
  check_anchor(anchor, x.size());
  g_nonstationary_evals.fetch_add(1, std::memory_order_relaxed);
  double e = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double diff = std::abs(x[d] - anchor.s[d]) - std::abs(z[d] - anchor.s[d]);
    e -= diff * diff / (2.0 * params.theta[d] * params.theta[d]);
  }
  return params.theta_f * std::exp(e);
}

double kernel_houses(std::span<const double> x, std::span<const double> z, const KernelParams& params,
                     const AnchorPoint& anchor) {
  check_dims(x, z, params);
  check_anchor(anchor, x.size());
  g_nonstationary_evals.fetch_add(1, std::memory_order_relaxed);
  double e1 = 0.0;
  double e2 = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double a = params.alpha[d];
    const double b = params.beta[d];
    const double diff = kumaraswamy_warp(std::abs(x[d] - anchor.s[d]), a, b) -
                        kumaraswamy_warp(std::abs(z[d] - anchor.s[d]), a, b);
    e1 -= diff * diff / (2.0 * params.theta[d] * params.theta[d]);
    const double w = kumaraswamy_warp(std::abs(x[d] - z[d]), a, b);
    e2 -= w * w / (2.0 * params.gamma[d] * params.gamma[d]);
  }
  return params.theta_f * std::exp(e1) + params.theta_k * std::exp(e2);
}

double kernel(std::span<const double> x, std::span<const double> z, const KernelParams& params,
              const AnchorPoint* anchor) {
  switch (params.kind) {
    case KernelKind::ard_se: return kernel_ard_se(x, z, params);
    case KernelKind::relative_distance:
      if (!anchor) throw ArgumentError("relative-distance kernel needs an anchor point");
      return kernel_relative_distance(x, z, params, *anchor);
    case KernelKind::houses:
      if (!anchor) throw ArgumentError("houses kernel needs an anchor point");
      return kernel_houses(x, z, params, *anchor);
  }
  throw ArgumentError("unknown kernel kind");
}

Eigen::MatrixXd build_cov_matrix(const Eigen::MatrixXd& X, const KernelParams& params,
                                 const AnchorPoint* anchor) {
  const auto n = X.rows();
  Eigen::MatrixXd K(n, n);
  std::vector<double> xi(X.cols()), xj(X.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index d = 0; d < X.cols(); ++d) xi[d] = X(i, d);
    for (Eigen::Index j = 0; j <= i; ++j) {
      for (Eigen::Index d = 0; d < X.cols(); ++d) xj[d] = X(j, d);
      const double v = kernel(xi, xj, params, anchor);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

std::size_t kernel_term_count(KernelKind kind) { return kind == KernelKind::houses ? 2 : 1; }

double kernel_term_amplitude(const KernelParams& params, std::size_t term) {
  return term == 0 ? params.theta_f : params.theta_k;
}

double kernel_term_factor(const KernelParams& params, const AnchorPoint* anchor, std::size_t term,
                          std::size_t d, double x, double z) {
  switch (params.kind) {
    case KernelKind::ard_se: {
      const double diff = x - z;
      return std::exp(-diff * diff / (2.0 * params.theta[d] * params.theta[d]));
    }
    case KernelKind::relative_distance: {
      const double diff = std::abs(x - anchor->s[d]) - std::abs(z - anchor->s[d]);
      return std::exp(-diff * diff / (2.0 * params.theta[d] * params.theta[d]));
    }
    case KernelKind::houses: {
      const double a = params.alpha[d];
      const double b = params.beta[d];
      if (term == 0) {
        const double diff = kumaraswamy_warp(std::abs(x - anchor->s[d]), a, b) -
                            kumaraswamy_warp(std::abs(z - anchor->s[d]), a, b);
        return std::exp(-diff * diff / (2.0 * params.theta[d] * params.theta[d]));
      }
      const double w = kumaraswamy_warp(std::abs(x - z), a, b);
      return std::exp(-w * w / (2.0 * params.gamma[d] * params.gamma[d]));
    }
  }
  return 0.0;
}

std::uint64_t nonstationary_kernel_evaluations() {
  return g_nonstationary_evals.load(std::memory_order_relaxed);
}

void count_nonstationary_evaluations(std::uint64_t n) {
  g_nonstationary_evals.fetch_add(n, std::memory_order_relaxed);
}

}  // namespace houses
