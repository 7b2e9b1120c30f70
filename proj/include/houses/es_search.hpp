#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "houses/acquisition.hpp"
#include "houses/rng.hpp"

namespace houses {

class GPModel;

struct ESConfig {
  std::size_t grids = 5;      // M: bins per dimension for parent selection
  std::size_t offspring = 10; // n_d: children per parent
  double pm = 0.0;            // base mutation rate; <= 0 means 1/D
  double eta = 20.0;          // polynomial-mutation distribution index
  double p_min = 0.05;
  double p_max = 0.95;

  void validate() const;
  double base_rate(std::size_t dim) const { return pm > 0.0 ? pm : 1.0 / static_cast<double>(dim); }
};

/// A truly evaluated point as seen by the search.
struct Individual {
  std::vector<double> unit;
  double value = 0.0;
  std::size_t index = 0;
};

/// Best individual of each (dimension, bin) cell, deduplicated, in
/// first-selection order. At most D * M entries.
std::vector<Individual> grid_select(std::span<const Individual> history, std::size_t grids);

/// p_d = clamp(pm * D * (I_d + eps) / sum_j (I_j + eps), p_min, p_max), eps = 0.01.
std::vector<double> mutation_probabilities(std::span<const double> importance, const ESConfig& config);

/// Bounded polynomial mutation: each gene mutates with its own probability,
/// moving a fraction delta of the distance to the bound it moves towards.
std::vector<double> polynomial_mutation(std::span<const double> parent, std::span<const double> probs, double eta,
                                        Rng& rng);

struct Proposal {
  std::vector<double> unit;
  double score = 0.0;
  double mean = 0.0;
  double sigma = 0.0;
  std::size_t candidates = 0;
  bool replaced_duplicate = false;
  std::vector<Candidate> scored;  // filled when keep_candidates is set
};

/// Generates `offspring` mutants per parent, scores them on the surrogate and
/// returns the acquisition-best one. A winner that duplicates an evaluated
/// point (1e-9 per coordinate) is re-mutated up to 10 times, then replaced by
/// a uniform random point.
Proposal propose(const GPModel& model, const AcquisitionSpec& spec, std::span<const Individual> parents,
                 std::span<const double> importance, const ESConfig& config, Rng& rng,
                 std::span<const std::vector<double>> evaluated = {}, bool keep_candidates = false);

}  // namespace houses
