#include "houses/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "houses/errors.hpp"
#include "houses/rng.hpp"

namespace houses {

namespace {

constexpr double kJitterBase = 1e-10;
constexpr double kJitterMax = 1e-4;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double amplitude_scale(const KernelParams& p) {
  const double a = p.theta_f + (p.kind == KernelKind::houses ? p.theta_k : 0.0);
  return a > 0.0 ? a : 1.0;
}

// Cholesky of K + (noise + jitter) I with the doubling jitter schedule.
// Returns false if even the largest jitter fails.
bool factorize_with_jitter(const Eigen::MatrixXd& K, double noise_var, double amp,
                           Eigen::LLT<Eigen::MatrixXd>& llt, double& jitter_used) {
  const auto n = K.rows();
  Eigen::MatrixXd A = K;
  for (double jitter = kJitterBase * amp; jitter <= kJitterMax * amp * (1.0 + 1e-12); jitter *= 2.0) {
    A.diagonal() = K.diagonal().array() + noise_var + jitter;
    llt.compute(A);
    if (llt.info() == Eigen::Success) {
      const auto& L = llt.matrixLLT();
      bool ok = true;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!(L(i, i) > 0.0) || !std::isfinite(L(i, i))) {
          ok = false;
          break;
        }
      }
      if (ok) {
        jitter_used = jitter;
        return true;
      }
    }
  }
  return false;
}

double lml_from_factor(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::VectorXd& t,
                       Eigen::VectorXd* weights_out) {
  Eigen::VectorXd w = llt.solve(t);
  const auto& L = llt.matrixLLT();
  double logdet_half = 0.0;
  for (Eigen::Index i = 0; i < L.rows(); ++i) logdet_half += std::log(L(i, i));
  const double n = static_cast<double>(t.size());
  const double v = -0.5 * t.dot(w) - logdet_half - 0.5 * n * std::log(2.0 * std::numbers::pi);
  if (weights_out) *weights_out = std::move(w);
  return v;
}

// Per-dimension exponent matrices over the upper triangle of the training
// pairs, refreshed only for dimensions whose hyperparameters changed. Makes
// one coordinate move of the hyperparameter search O(n^2) instead of O(n^2 D).
class CovarianceCache {
 public:
  CovarianceCache(const Eigen::MatrixXd& X, KernelKind kind, const AnchorPoint* anchor)
      : X_(X), kind_(kind), n_(X.rows()), dim_(X.cols()) {
    pairs_ = n_ * (n_ - 1) / 2;
    const std::size_t terms = kernel_term_count(kind);
    exponents_.assign(terms, std::vector<std::vector<double>>(dim_, std::vector<double>(pairs_)));
    sums_.assign(terms, std::vector<double>(pairs_));
    cached_.assign(dim_, {std::numeric_limits<double>::quiet_NaN(), 0, 0, 0});
    base_.assign(dim_, std::vector<double>(pairs_));
    if (kind != KernelKind::ard_se) {
      anchor_dist_.resize(n_, dim_);
      for (Eigen::Index i = 0; i < n_; ++i)
        for (Eigen::Index d = 0; d < dim_; ++d) anchor_dist_(i, d) = std::abs(X(i, d) - anchor->s[d]);
    }
    // Parameter-free pairwise quantities.
    for (Eigen::Index d = 0; d < dim_; ++d) {
      std::size_t p = 0;
      for (Eigen::Index i = 0; i < n_; ++i) {
        for (Eigen::Index j = i + 1; j < n_; ++j, ++p) {
          switch (kind) {
            case KernelKind::ard_se: {
              const double diff = X(i, d) - X(j, d);
              base_[d][p] = diff * diff;
              break;
            }
            case KernelKind::relative_distance: {
              const double diff = anchor_dist_(i, d) - anchor_dist_(j, d);
              base_[d][p] = diff * diff;
              break;
            }
            case KernelKind::houses:
              base_[d][p] = std::log(std::abs(X(i, d) - X(j, d)));
              break;
          }
        }
      }
    }
  }

  void assemble(const KernelParams& params, Eigen::MatrixXd& K) {
    refresh(params);
    K.resize(n_, n_);
    const double diag = params.theta_f + (kind_ == KernelKind::houses ? params.theta_k : 0.0);
    std::size_t p = 0;
    for (Eigen::Index i = 0; i < n_; ++i) {
      K(i, i) = diag;
      for (Eigen::Index j = i + 1; j < n_; ++j, ++p) {
        double v = params.theta_f * std::exp(-sums_[0][p]);
        if (kind_ == KernelKind::houses) v += params.theta_k * std::exp(-sums_[1][p]);
        K(i, j) = v;
        K(j, i) = v;
      }
    }
    if (kind_ != KernelKind::ard_se) count_nonstationary_evaluations(static_cast<std::uint64_t>(n_ * n_));
  }

 private:
  struct DimParams {
    double theta, gamma, alpha, beta;
  };

  void refresh(const KernelParams& params) {
    bool any = false;
    for (Eigen::Index d = 0; d < dim_; ++d) {
      DimParams now{params.theta[d], 0, 0, 0};
      if (kind_ == KernelKind::houses) now = {params.theta[d], params.gamma[d], params.alpha[d], params.beta[d]};
      const DimParams& old = cached_[d];
      if (now.theta == old.theta && now.gamma == old.gamma && now.alpha == old.alpha && now.beta == old.beta)
        continue;
      any = true;
      const bool shape_changed = kind_ == KernelKind::houses && (now.alpha != old.alpha || now.beta != old.beta ||
                                                                  std::isnan(old.theta));
      recompute_dim(d, now, shape_changed);
      cached_[d] = now;
    }
    if (!any) return;
    for (std::size_t t = 0; t < sums_.size(); ++t) {
      std::fill(sums_[t].begin(), sums_[t].end(), 0.0);
      for (Eigen::Index d = 0; d < dim_; ++d) {
        const auto& e = exponents_[t][d];
        auto& s = sums_[t];
        for (std::size_t p = 0; p < pairs_; ++p) s[p] += e[p];
      }
    }
  }

  void recompute_dim(Eigen::Index d, const DimParams& dp, bool shape_changed) {
    const double inv1 = 1.0 / (2.0 * dp.theta * dp.theta);
    if (kind_ != KernelKind::houses) {
      auto& e = exponents_[0][d];
      for (std::size_t p = 0; p < pairs_; ++p) e[p] = base_[d][p] * inv1;
      return;
    }
    if (shape_changed) {
      warped_anchor_.resize(n_);
      for (Eigen::Index i = 0; i < n_; ++i) warped_anchor_[i] = kumaraswamy_warp(anchor_dist_(i, d), dp.alpha, dp.beta);
      // Kumaraswamy CDF from log u: 1 - (1 - e^{alpha log u})^beta. log 0 = -inf maps to 0.
      if (warped_sq_.size() != static_cast<std::size_t>(dim_)) {
        warped_sq_.assign(dim_, std::vector<double>(pairs_));
        loc_sq_.assign(dim_, std::vector<double>(pairs_));
      }
      std::size_t p = 0;
      for (Eigen::Index i = 0; i < n_; ++i) {
        for (Eigen::Index j = i + 1; j < n_; ++j, ++p) {
          const double diff = warped_anchor_[i] - warped_anchor_[j];
          loc_sq_[d][p] = diff * diff;
          const double w = -std::expm1(dp.beta * std::log1p(-std::exp(dp.alpha * base_[d][p])));
          warped_sq_[d][p] = w * w;
        }
      }
    }
    const double inv2 = 1.0 / (2.0 * dp.gamma * dp.gamma);
    auto& e1 = exponents_[0][d];
    auto& e2 = exponents_[1][d];
    for (std::size_t p = 0; p < pairs_; ++p) {
      e1[p] = loc_sq_[d][p] * inv1;
      e2[p] = warped_sq_[d][p] * inv2;
    }
  }

  const Eigen::MatrixXd& X_;
  KernelKind kind_;
  Eigen::Index n_;
  Eigen::Index dim_;
  std::size_t pairs_ = 0;
  Eigen::MatrixXd anchor_dist_;
  std::vector<std::vector<double>> base_;
  std::vector<std::vector<double>> loc_sq_, warped_sq_;
  std::vector<double> warped_anchor_;
  std::vector<std::vector<std::vector<double>>> exponents_;
  std::vector<std::vector<double>> sums_;
  std::vector<DimParams> cached_;
};

// Log-space coordinates of the searched hyperparameters.
struct Coordinate {
  double lo, hi;
  double* (*slot)(KernelParams&, std::size_t);
  std::size_t index;
};

std::vector<Coordinate> coordinates(KernelKind kind, std::size_t dim) {
  using B = HyperparameterBounds;
  std::vector<Coordinate> c;
  c.push_back({std::log(B::amplitude_lo), std::log(B::amplitude_hi), [](KernelParams& p, std::size_t) { return &p.theta_f; }, 0});
  c.push_back({std::log(B::noise_lo), std::log(B::noise_hi), [](KernelParams& p, std::size_t) { return &p.theta_c; }, 0});
  for (std::size_t d = 0; d < dim; ++d)
    c.push_back({std::log(B::length_lo), std::log(B::length_hi), [](KernelParams& p, std::size_t i) { return &p.theta[i]; }, d});
  if (kind == KernelKind::houses) {
    c.push_back({std::log(B::amplitude_lo), std::log(B::amplitude_hi), [](KernelParams& p, std::size_t) { return &p.theta_k; }, 0});
    for (std::size_t d = 0; d < dim; ++d)
      c.push_back({std::log(B::length_lo), std::log(B::length_hi), [](KernelParams& p, std::size_t i) { return &p.gamma[i]; }, d});
    for (std::size_t d = 0; d < dim; ++d)
      c.push_back({std::log(B::shape_lo), std::log(B::shape_hi), [](KernelParams& p, std::size_t i) { return &p.alpha[i]; }, d});
    for (std::size_t d = 0; d < dim; ++d)
      c.push_back({std::log(B::shape_lo), std::log(B::shape_hi), [](KernelParams& p, std::size_t i) { return &p.beta[i]; }, d});
  }
  return c;
}

class LmlObjective {
 public:
  LmlObjective(const Eigen::MatrixXd& X, const Eigen::VectorXd& t, KernelKind kind, const AnchorPoint* anchor)
      : cache_(X, kind, anchor), t_(t) {}

  double operator()(const KernelParams& p) {
    cache_.assemble(p, K_);
    double jitter = 0.0;
    if (!factorize_with_jitter(K_, p.theta_c * p.theta_c, amplitude_scale(p), llt_, jitter)) return kNegInf;
    const double v = lml_from_factor(llt_, t_, nullptr);
    return std::isfinite(v) ? v : kNegInf;
  }

 private:
  CovarianceCache cache_;
  const Eigen::VectorXd& t_;
  Eigen::MatrixXd K_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

// Coordinate-wise pattern search in log space: try +/- step on each
// coordinate, keep improvements, halve the step when a sweep stalls. Each
// start is capped at kEvaluationsPerCoordinate * |coordinates| likelihood
// evaluations.
double coordinate_search(LmlObjective& objective, const std::vector<Coordinate>& coords, KernelParams& params,
                         double value) {
  constexpr double kInitialStep = 1.0;
  constexpr double kFinalStep = 0.1;
  constexpr int kMaxSweepsPerStep = 2;
  constexpr std::size_t kEvaluationsPerCoordinate = 12;
  std::size_t budget = kEvaluationsPerCoordinate * coords.size();
  for (double step = kInitialStep; step >= kFinalStep && budget > 0; step *= 0.5) {
    for (int sweep = 0; sweep < kMaxSweepsPerStep && budget > 0; ++sweep) {
      bool improved = false;
      for (const auto& c : coords) {
        double* slot = c.slot(params, c.index);
        const double current = std::log(*slot);
        const double original = *slot;
        for (double dir : {1.0, -1.0}) {
          const double next = std::clamp(current + dir * step, c.lo, c.hi);
          if (next == current || budget == 0) continue;
          *slot = std::exp(next);
          --budget;
          const double v = objective(params);
          if (v > value + 1e-10) {
            value = v;
            improved = true;
            break;
          }
          *slot = original;
        }
      }
      if (!improved) break;
    }
  }
  return value;
}

void check_inputs(const Eigen::MatrixXd& X, std::span<const double> y) {
  if (X.rows() < 1) throw ArgumentError("GP needs at least one training point");
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw ArgumentError("GP: X rows and y length differ");
  for (double v : y) {
    if (!std::isfinite(v)) throw DataError("GP: non-finite target value");
  }
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index d = 0; d < X.cols(); ++d) {
      const double u = X(i, d);
      if (!(u >= 0.0 && u <= 1.0)) throw ArgumentError("GP: training inputs must lie in the unit cube");
    }
  }
}

void check_anchor(KernelKind kind, const std::optional<AnchorPoint>& anchor, Eigen::Index dim) {
  if (kind == KernelKind::ard_se) return;
  if (!anchor) throw ArgumentError("non-stationary kernel needs an anchor point");
  if (static_cast<Eigen::Index>(anchor->s.size()) != dim) throw ArgumentError("anchor dimension mismatch");
}

}  // namespace

double log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& targets,
                               const KernelParams& params, const AnchorPoint* anchor) {
  const Eigen::MatrixXd K = build_cov_matrix(X, params, anchor);
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;
  if (!factorize_with_jitter(K, params.theta_c * params.theta_c, amplitude_scale(params), llt, jitter)) {
    return kNegInf;
  }
  return lml_from_factor(llt, targets, nullptr);
}

GPModel GPModel::build(const Eigen::MatrixXd& X, std::span<const double> y, const KernelParams& params,
                       std::optional<AnchorPoint> anchor, bool standardize) {
  check_inputs(X, y);
  params.validate(static_cast<std::size_t>(X.cols()));
  check_anchor(params.kind, anchor, X.cols());
  GPModel m;
  m.X_ = X;
  m.y_ = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  if (standardize) {
    m.y_mean_ = m.y_.mean();
    const double var = (m.y_.array() - m.y_mean_).square().mean();
    m.y_scale_ = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  m.params_ = params;
  if (params.kind != KernelKind::ard_se) m.anchor_ = std::move(anchor);
  m.factorize();
  m.precompute_features();
  return m;
}

GPModel GPModel::fit(const Eigen::MatrixXd& X, std::span<const double> y, KernelKind kind,
                     std::optional<AnchorPoint> anchor, std::uint64_t seed, const FitOptions& options) {
  check_inputs(X, y);
  check_anchor(kind, anchor, X.cols());
  const auto dim = static_cast<std::size_t>(X.cols());
  KernelParams best = KernelParams::defaults(kind, dim);
  if (X.rows() < 2) return build(X, y, best, std::move(anchor), options.standardize);

  // Targets as build() will standardize them.
  Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  if (options.standardize) {
    const double mean = t.mean();
    const double var = (t.array() - mean).square().mean();
    t = (t.array() - mean) / (var > 1e-24 ? std::sqrt(var) : 1.0);
  }

  const AnchorPoint* anchor_ptr = anchor ? &*anchor : nullptr;
  LmlObjective objective(X, t, kind, anchor_ptr);
  const auto coords = coordinates(kind, dim);
  Rng rng(seed, {0x6f1});

  double best_value = kNegInf;
  const std::size_t starts = std::max<std::size_t>(1, options.starts);
  for (std::size_t s = 0; s < starts; ++s) {
    KernelParams start = KernelParams::defaults(kind, dim);
    if (s > 0) {
      for (const auto& c : coords) *c.slot(start, c.index) = std::exp(c.lo + rng.uniform() * (c.hi - c.lo));
    }
    double value = objective(start);
    value = coordinate_search(objective, coords, start, value);
    if (value > best_value) {
      best_value = value;
      best = start;
    }
  }
  return build(X, y, best, std::move(anchor), options.standardize);
}

void GPModel::factorize() {
  const Eigen::MatrixXd K = build_cov_matrix(X_, params_, anchor_ ? &*anchor_ : nullptr);
  Eigen::LLT<Eigen::MatrixXd> llt;
  if (!factorize_with_jitter(K, params_.theta_c * params_.theta_c, amplitude_scale(params_), llt, jitter_)) {
    throw ConditioningError("covariance matrix not positive definite at maximum jitter");
  }
  L_ = llt.matrixL();
  lml_ = lml_from_factor(llt, fitted_targets(), &w_);
}

void GPModel::precompute_features() {
  if (params_.kind == KernelKind::ard_se) return;
  anchor_features_.resize(X_.rows(), X_.cols());
  for (Eigen::Index i = 0; i < X_.rows(); ++i) {
    for (Eigen::Index d = 0; d < X_.cols(); ++d) {
      const double r = std::abs(X_(i, d) - anchor_->s[d]);
      anchor_features_(i, d) =
          params_.kind == KernelKind::houses ? kumaraswamy_warp(r, params_.alpha[d], params_.beta[d]) : r;
    }
  }
}

void GPModel::cross_covariance(std::span<const double> x, Eigen::VectorXd& k) const {
  const auto n = X_.rows();
  const auto D = X_.cols();
  if (static_cast<Eigen::Index>(x.size()) != D) {
    throw ArgumentError("predict: expected " + std::to_string(D) + " coordinates, got " + std::to_string(x.size()));
  }
  k.resize(n);
  const auto& p = params_;
  if (p.kind == KernelKind::ard_se) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double e = 0.0;
      for (Eigen::Index d = 0; d < D; ++d) {
        const double diff = x[d] - X_(i, d);
        e -= diff * diff / (2.0 * p.theta[d] * p.theta[d]);
      }
      k[i] = p.theta_f * std::exp(e);
    }
    return;
  }
  count_nonstationary_evaluations(static_cast<std::uint64_t>(n));
  std::vector<double> feat(D);
  for (Eigen::Index d = 0; d < D; ++d) {
    const double r = std::abs(x[d] - anchor_->s[d]);
    feat[d] = p.kind == KernelKind::houses ? kumaraswamy_warp(r, p.alpha[d], p.beta[d]) : r;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    double e1 = 0.0;
    double e2 = 0.0;
    for (Eigen::Index d = 0; d < D; ++d) {
      const double diff = feat[d] - anchor_features_(i, d);
      e1 -= diff * diff / (2.0 * p.theta[d] * p.theta[d]);
      if (p.kind == KernelKind::houses) {
        const double w = kumaraswamy_warp(std::abs(x[d] - X_(i, d)), p.alpha[d], p.beta[d]);
        e2 -= w * w / (2.0 * p.gamma[d] * p.gamma[d]);
      }
    }
    k[i] = p.theta_f * std::exp(e1) + (p.kind == KernelKind::houses ? p.theta_k * std::exp(e2) : 0.0);
  }
}

Prediction GPModel::predict(std::span<const double> x) const {
  Eigen::VectorXd k;
  cross_covariance(x, k);
  const double mean = k.dot(w_);
  const Eigen::VectorXd v = L_.triangularView<Eigen::Lower>().solve(k);
  const double prior = params_.theta_f + (params_.kind == KernelKind::houses ? params_.theta_k : 0.0);
  double var = prior - v.squaredNorm();
  if (var < 0.0) var = 0.0;
  return {y_mean_ + y_scale_ * mean, y_scale_ * y_scale_ * var};
}

double GPModel::predict_mean(std::span<const double> x) const {
  Eigen::VectorXd k;
  cross_covariance(x, k);
  return y_mean_ + y_scale_ * k.dot(w_);
}

}  // namespace houses
