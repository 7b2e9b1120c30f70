#include "houses/mlp_synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "houses/errors.hpp"
#include "houses/rng.hpp"

namespace houses {

namespace {

constexpr std::size_t kTrainSize = 400;
constexpr std::size_t kValidationSize = 200;
constexpr double kNoise = 0.2;

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct Network {
  std::size_t hidden;
  std::vector<double> w1;  // hidden x 2
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;

  double logit(const double* x, std::vector<double>& h) const {
    double z = b2;
    for (std::size_t j = 0; j < hidden; ++j) {
      const double a = w1[2 * j] * x[0] + w1[2 * j + 1] * x[1] + b1[j];
      h[j] = a > 0.0 ? a : 0.0;
      z += w2[j] * h[j];
    }
    return z;
  }
};

}  // namespace

MlpHyperparameters MlpHyperparameters::from_raw(std::span<const double> raw) {
  if (raw.size() != 5) throw ArgumentError("mlp_synth expects 5 hyperparameters");
  MlpHyperparameters hp;
  hp.learning_rate = raw[0];
  hp.hidden_units = static_cast<int>(std::lround(raw[1]));
  hp.l2 = raw[2];
  hp.epochs = static_cast<int>(std::lround(raw[3]));
  hp.batch_size = static_cast<int>(std::lround(raw[4]));
  if (!(hp.learning_rate > 0.0) || hp.hidden_units < 1 || !(hp.l2 >= 0.0) || hp.epochs < 1 || hp.batch_size < 1) {
    throw ArgumentError("mlp_synth: hyperparameter out of range");
  }
  return hp;
}

MlpDataset make_two_moons(std::uint64_t seed) {
  Rng rng(seed, {0x4d00});
  auto sample = [&](std::size_t n, TwoMoons& out) {
    out.x.resize(2 * n);
    out.label.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const int label = static_cast<int>(i % 2);
      const double t = std::numbers::pi * rng.uniform();
      double a = label == 0 ? std::cos(t) : 1.0 - std::cos(t);
      double b = label == 0 ? std::sin(t) : 0.5 - std::sin(t);
      a += kNoise * rng.normal();
      b += kNoise * rng.normal();
      // Centre roughly at the origin.
      out.x[2 * i] = a - 0.5;
      out.x[2 * i + 1] = b - 0.25;
      out.label[i] = label;
    }
  };
  MlpDataset data;
  sample(kTrainSize, data.train);
  sample(kValidationSize, data.validation);
  return data;
}

MlpResult train_mlp_synth(const MlpHyperparameters& hp, std::uint64_t seed) {
  const MlpDataset data = make_two_moons(seed);
  const auto H = static_cast<std::size_t>(hp.hidden_units);
  Rng rng(seed, {0x4d01, H});

  Network net{H, std::vector<double>(2 * H), std::vector<double>(H, 0.0), std::vector<double>(H, 0.0), 0.0};
  // He initialisation for fan-in 2; the output layer starts at zero so the
  // untrained network predicts one class everywhere (error 0.5).
  for (double& v : net.w1) v = rng.normal();

  const std::size_t n = data.train.size();
  const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(hp.batch_size), n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> h(H), gw1(2 * H), gb1(H), gw2(H);
  MlpResult result;

  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      std::fill(gw1.begin(), gw1.end(), 0.0);
      std::fill(gb1.begin(), gb1.end(), 0.0);
      std::fill(gw2.begin(), gw2.end(), 0.0);
      double gb2 = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t idx = order[k];
        const double* x = &data.train.x[2 * idx];
        const double y = data.train.label[idx];
        const double z = net.logit(x, h);
        const double p = sigmoid(z);
        // Cross-entropy via log-sum-exp to stay finite for large |z|.
        epoch_loss += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
        const double dz = p - y;
        gb2 += dz;
        for (std::size_t j = 0; j < H; ++j) {
          gw2[j] += dz * h[j];
          if (h[j] > 0.0) {
            const double dh = dz * net.w2[j];
            gw1[2 * j] += dh * x[0];
            gw1[2 * j + 1] += dh * x[1];
            gb1[j] += dh;
          }
        }
      }
      const double scale = hp.learning_rate / static_cast<double>(end - start);
      for (std::size_t j = 0; j < 2 * H; ++j) net.w1[j] -= scale * gw1[j] + hp.learning_rate * hp.l2 * net.w1[j];
      for (std::size_t j = 0; j < H; ++j) {
        net.w2[j] -= scale * gw2[j] + hp.learning_rate * hp.l2 * net.w2[j];
        net.b1[j] -= scale * gb1[j];
      }
      net.b2 -= scale * gb2;
    }
    if (!std::isfinite(epoch_loss) || !std::isfinite(net.b2)) {
      result.diverged = true;
      result.validation_error = 1.0;
      return result;
    }
  }

  const auto& val = data.validation;
  for (std::size_t i = 0; i < val.size(); ++i) {
    const bool predicted = net.logit(&val.x[2 * i], h) >= 0.0;
    const bool actual = val.label[i] == 1;
    if (predicted && actual) ++result.tp;
    else if (predicted && !actual) ++result.fp;
    else if (!predicted && actual) ++result.fn;
    else ++result.tn;
  }
  result.validation_error = static_cast<double>(result.fp + result.fn) / static_cast<double>(val.size());
  return result;
}

MlpHyperparameters mlp_reference_config() {
  MlpHyperparameters hp;
  hp.learning_rate = 0.1;
  hp.hidden_units = 16;
  hp.l2 = 1e-4;
  hp.epochs = 50;
  hp.batch_size = 16;
  return hp;
}

}  // namespace houses
