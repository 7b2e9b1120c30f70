#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace houses {

/// Hyperparameters of the synthetic classifier objective, in the order the
/// five-dimensional space lists them.
struct MlpHyperparameters {
  double learning_rate = 0.1;  // log [1e-3, 1]
  int hidden_units = 16;       // [2, 64]
  double l2 = 1e-4;            // log [1e-6, 1e-1]
  int epochs = 50;             // [5, 200]
  int batch_size = 16;         // [4, 64]

  static MlpHyperparameters from_raw(std::span<const double> raw);
};

struct TwoMoons {
  std::vector<double> x;  // row-major, 2 features per sample
  std::vector<int> label;
  std::size_t size() const { return label.size(); }
};

struct MlpDataset {
  TwoMoons train;
  TwoMoons validation;
};

/// Two interleaved noisy arcs: 400 training and 200 validation points.
MlpDataset make_two_moons(std::uint64_t seed);

struct MlpResult {
  double validation_error = 1.0;
  bool diverged = false;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;  // validation confusion counts
};

/// Trains a one-hidden-layer ReLU network with a logistic output by minibatch
/// SGD with L2 weight decay, and reports the validation error rate.
/// Deterministic in (hyperparameters, seed).
MlpResult train_mlp_synth(const MlpHyperparameters& hp, std::uint64_t seed);

/// Hand-tuned reference configuration and its recorded validation error on
/// data seed 0 (see tests/unit/test_mlp_synth.cpp, which re-derives it).
MlpHyperparameters mlp_reference_config();
inline constexpr double kMlpReferenceError = 0.06;

}  // namespace houses
