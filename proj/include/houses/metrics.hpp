#pragma once

#include <cstdint>
#include <optional>

namespace houses {

/// Binary classification rates; a rate whose denominator is zero is empty.
struct ClassificationMetrics {
  std::optional<double> accuracy;
  std::optional<double> sensitivity;  // TP / (TP + FN)
  std::optional<double> specificity;  // TN / (TN + FP)
};

ClassificationMetrics metrics(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn, std::uint64_t tn);

}  // namespace houses
