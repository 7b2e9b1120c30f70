#include "houses/fanova.hpp"

#include <boost/random/sobol.hpp>
#include <cmath>

#include "houses/errors.hpp"
#include "houses/gp.hpp"
#include "houses/rng.hpp"

namespace houses {

namespace {

constexpr double kDegenerateVariance = 1e-12;

void check_options(const FanovaOptions& o) {
  if (o.grid_size < 2) throw ArgumentError("fanova: grid_size must be >= 2");
  if (o.mc_samples < 1) throw ArgumentError("fanova: mc_samples must be >= 1");
}

void center(MarginalCurve& curve) {
  double mean = 0.0;
  for (double v : curve.values) mean += v;
  mean /= static_cast<double>(curve.values.size());
  for (double& v : curve.values) v -= mean;
}

ImportanceReport summarize(std::vector<MarginalCurve> curves) {
  ImportanceReport r;
  const std::size_t dim = curves.size();
  r.variances.resize(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    double s = 0.0;
    for (double v : curves[d].values) s += v * v;
    r.variances[d] = s / static_cast<double>(curves[d].values.size());
    r.total_variance += r.variances[d];
  }
  r.importances.assign(dim, 1.0 / static_cast<double>(dim));
  if (r.total_variance >= kDegenerateVariance) {
    for (std::size_t d = 0; d < dim; ++d) r.importances[d] = r.variances[d] / r.total_variance;
  }
  r.curves = std::move(curves);
  return r;
}

}  // namespace

std::vector<double> fanova_grid(std::size_t grid_size) {
  std::vector<double> g(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) g[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(grid_size);
  return g;
}

Eigen::MatrixXd scrambled_sobol(std::size_t dim, std::size_t n, std::uint64_t seed) {
  if (dim < 1) throw ArgumentError("scrambled_sobol: dimension must be >= 1");
  boost::random::sobol qrng(dim);
  Rng rng(seed, {0x50b});
  std::vector<std::uint64_t> shift(dim);
  for (auto& s : shift) s = rng.next_u64();
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  // boost's generator starts after the origin; putting the origin first makes
  // every prefix of length 2^m a complete net.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim; ++d) {
      const std::uint64_t raw = i == 0 ? 0 : static_cast<std::uint64_t>(qrng());
      const std::uint64_t v = raw ^ shift[d];
      pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = static_cast<double>(v >> 11) * 0x1.0p-53;
    }
  }
  return pts;
}

MarginalCurve marginal_curve(const MeanFunction& predictor, std::size_t dim, std::size_t d,
                             const FanovaOptions& options) {
  check_options(options);
  if (d >= dim) throw ArgumentError("marginal_curve: dimension index " + std::to_string(d) + " out of range");
  const Eigen::MatrixXd z = scrambled_sobol(dim, options.mc_samples, options.seed);
  MarginalCurve curve;
  curve.dimension = d;
  curve.grid = fanova_grid(options.grid_size);
  curve.values.resize(curve.grid.size());
  std::vector<double> x(dim);
  for (std::size_t g = 0; g < curve.grid.size(); ++g) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      for (std::size_t e = 0; e < dim; ++e) x[e] = z(i, static_cast<Eigen::Index>(e));
      x[d] = curve.grid[g];
      sum += predictor(x);
    }
    curve.values[g] = sum / static_cast<double>(z.rows());
  }
  center(curve);
  return curve;
}

ImportanceReport importance(const MeanFunction& predictor, std::size_t dim, const FanovaOptions& options) {
  if (dim < 1) throw ArgumentError("importance: dimension must be >= 1");
  std::vector<MarginalCurve> curves;
  for (std::size_t d = 0; d < dim; ++d) curves.push_back(marginal_curve(predictor, dim, d, options));
  return summarize(std::move(curves));
}

ImportanceReport importance(const GPModel& model, const FanovaOptions& options) {
  check_options(options);
  const auto& p = model.params();
  const auto& X = model.inputs();
  const Eigen::VectorXd& w = model.weights();
  const auto n = X.rows();
  const auto D = X.cols();
  const std::size_t dim = static_cast<std::size_t>(D);
  const Eigen::MatrixXd z = scrambled_sobol(dim, options.mc_samples, options.seed);
  const auto N = z.rows();
  const std::vector<double> grid = fanova_grid(options.grid_size);
  const bool houses = p.kind == KernelKind::houses;
  const std::size_t terms = kernel_term_count(p.kind);
  const double* s = model.anchor() ? model.anchor()->s.data() : nullptr;

  // Location feature of the first kernel term: the coordinate itself for the
  // stationary kernel, the (warped) distance to the anchor otherwise.
  auto feature = [&](Eigen::Index d, double x) {
    switch (p.kind) {
      case KernelKind::ard_se: return x;
      case KernelKind::relative_distance: return std::abs(x - s[d]);
      case KernelKind::houses: return kumaraswamy_warp(std::abs(x - s[d]), p.alpha[d], p.beta[d]);
    }
    return x;
  };
  auto loc_factor = [&](Eigen::Index d, double fx, double fz) {
    const double diff = fx - fz;
    return std::exp(-diff * diff / (2.0 * p.theta[d] * p.theta[d]));
  };
  auto sep_factor = [&](Eigen::Index d, double x, double xi) {
    const double u = kumaraswamy_warp(std::abs(x - xi), p.alpha[d], p.beta[d]);
    return std::exp(-u * u / (2.0 * p.gamma[d] * p.gamma[d]));
  };

  Eigen::MatrixXd train_feat(n, D), z_feat(N, D);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index d = 0; d < D; ++d) train_feat(i, d) = feature(d, X(i, d));
  for (Eigen::Index k = 0; k < N; ++k)
    for (Eigen::Index d = 0; d < D; ++d) z_feat(k, d) = feature(d, z(k, d));
  if (p.kind != KernelKind::ard_se) {
    count_nonstationary_evaluations(static_cast<std::uint64_t>(n * N + n * static_cast<Eigen::Index>(grid.size()) * D));
  }

  // avg[t](i, d) = mean over z of prod_{e != d} factor_t(e, z_e, x_ie).
  std::vector<Eigen::MatrixXd> avg(terms, Eigen::MatrixXd::Zero(n, D));
  std::vector<double> f(dim), prefix(dim + 1), suffix(dim + 1);
  for (std::size_t t = 0; t < terms; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < N; ++k) {
        for (Eigen::Index e = 0; e < D; ++e) {
          f[e] = t == 0 ? loc_factor(e, z_feat(k, e), train_feat(i, e)) : sep_factor(e, z(k, e), X(i, e));
        }
        prefix[0] = 1.0;
        for (std::size_t e = 0; e < dim; ++e) prefix[e + 1] = prefix[e] * f[e];
        suffix[dim] = 1.0;
        for (std::size_t e = dim; e-- > 0;) suffix[e] = suffix[e + 1] * f[e];
        for (std::size_t d = 0; d < dim; ++d) avg[t](i, static_cast<Eigen::Index>(d)) += prefix[d] * suffix[d + 1];
      }
    }
    avg[t] /= static_cast<double>(N);
  }

  std::vector<MarginalCurve> curves(dim);
  for (std::size_t du = 0; du < dim; ++du) {
    const auto d = static_cast<Eigen::Index>(du);
    auto& curve = curves[du];
    curve.dimension = du;
    curve.grid = grid;
    curve.values.resize(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const double fg = feature(d, grid[g]);
      double sum = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        double k = p.theta_f * loc_factor(d, fg, train_feat(i, d)) * avg[0](i, d);
        if (houses) k += p.theta_k * sep_factor(d, grid[g], X(i, d)) * avg[1](i, d);
        sum += w[i] * k;
      }
      curve.values[g] = model.target_mean() + model.target_scale() * sum;
    }
    center(curve);
  }
  return summarize(std::move(curves));
}

}  // namespace houses
