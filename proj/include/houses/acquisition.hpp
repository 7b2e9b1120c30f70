#pragma once

#include <span>
#include <string>
#include <vector>

namespace houses {

enum class AcquisitionKind { pi, ei, ucb };

std::string to_string(AcquisitionKind kind);
AcquisitionKind parse_acquisition_kind(const std::string& s);

/// Acquisition setup for a minimization problem; larger scores are better.
struct AcquisitionSpec {
  AcquisitionKind kind = AcquisitionKind::ucb;
  double w = 2.0;       // UCB exploration weight
  double f_best = 0.0;  // lowest objective value observed so far
};

double normal_pdf(double z);
double normal_cdf(double z);

/// PI: Phi(gamma). EI: sigma (gamma Phi(gamma) + phi(gamma)).
/// UCB: w sigma - mean, i.e. the negated lower confidence bound.
/// gamma = (f_best - mean) / sigma.
double score(const AcquisitionSpec& spec, double mean, double sigma);

struct Candidate {
  std::vector<double> point;
  double mean = 0.0;
  double sigma = 0.0;
};

/// Index of the highest-scoring candidate; ties go to the lower mean, then
/// the lower index.
std::size_t argbest(const AcquisitionSpec& spec, std::span<const Candidate> candidates);

}  // namespace houses
