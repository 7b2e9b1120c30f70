#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace houses {

enum class ParamKind { continuous, integer };
enum class Scale { linear, logarithmic };

struct ParamSpec {
  std::string name;
  ParamKind kind = ParamKind::continuous;
  double lower = 0.0;
  double upper = 1.0;
  Scale scale = Scale::linear;
};

/// Ordered, validated list of hyperparameters. Immutable once constructed.
class SearchSpace {
 public:
  explicit SearchSpace(std::vector<ParamSpec> params);

  std::size_t dim() const { return params_.size(); }
  const ParamSpec& param(std::size_t d) const { return params_.at(d); }
  std::span<const ParamSpec> params() const { return params_; }
  std::vector<std::string> names() const;

  /// Parses `{"params": [{"name", "kind", "lower", "upper", "scale"}, ...]}`.
  static SearchSpace from_json(const nlohmann::json& doc);
  static SearchSpace load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  /// `dim` continuous linear [0,1] parameters named x1..xD.
  static SearchSpace unit_cube(std::size_t dim);

  bool operator==(const SearchSpace& other) const;

 private:
  std::vector<ParamSpec> params_;
};

/// A point of the space: the continuous unit-cube coordinates the surrogate
/// works with, and the raw values handed to the objective.
struct Configuration {
  std::vector<double> unit;
  std::vector<double> raw;
};

std::vector<double> normalize(const SearchSpace& space, std::span<const double> raw);

/// Inverse of normalize; integer parameters are rounded then clamped.
std::vector<double> denormalize(const SearchSpace& space, std::span<const double> unit);

Configuration make_configuration(const SearchSpace& space, std::span<const double> unit);

/// Latin hypercube design: every dimension split into n bins holding one
/// point each, with an independent random bin permutation per dimension.
std::vector<Configuration> lhs_sample(const SearchSpace& space, std::size_t n, std::uint64_t seed);

std::string to_string(ParamKind kind);
std::string to_string(Scale scale);

}  // namespace houses
