#include "houses/search_space.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "houses/errors.hpp"
#include "houses/rng.hpp"

namespace houses {

namespace {

void validate(const ParamSpec& p) {
  if (p.name.empty()) throw ArgumentError("parameter name must not be empty");
  if (!std::isfinite(p.lower) || !std::isfinite(p.upper) || !(p.lower < p.upper)) {
    throw ArgumentError("parameter '" + p.name + "': lower must be < upper");
  }
  if (p.scale == Scale::logarithmic && p.lower <= 0.0) {
    throw ArgumentError("parameter '" + p.name + "': logarithmic scale needs lower > 0");
  }
  if (p.kind == ParamKind::integer) {
    if (std::floor(p.lower) != p.lower || std::floor(p.upper) != p.upper) {
      throw ArgumentError("parameter '" + p.name + "': integer bounds must be integral");
    }
    if (p.upper - p.lower < 1.0) {
      throw ArgumentError("parameter '" + p.name + "': integer range must span at least 1");
    }
  }
}

ParamKind parse_kind(const std::string& s, const std::string& name) {
  if (s == "continuous" || s == "real" || s == "float") return ParamKind::continuous;
  if (s == "integer" || s == "int") return ParamKind::integer;
  throw ArgumentError("parameter '" + name + "': unknown kind '" + s + "'");
}

Scale parse_scale(const std::string& s, const std::string& name) {
  if (s == "linear") return Scale::linear;
  if (s == "logarithmic" || s == "log") return Scale::logarithmic;
  throw ArgumentError("parameter '" + name + "': unknown scale '" + s + "'");
}

}  // namespace

SearchSpace::SearchSpace(std::vector<ParamSpec> params) : params_(std::move(params)) {
  if (params_.empty()) throw ArgumentError("search space needs at least one parameter");
  std::set<std::string> seen;
  for (const auto& p : params_) {
    validate(p);
    if (!seen.insert(p.name).second) {
      throw ArgumentError("duplicate parameter name '" + p.name + "'");
    }
  }
}

std::vector<std::string> SearchSpace::names() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.name);
  return out;
}

SearchSpace SearchSpace::from_json(const nlohmann::json& doc) {
  const nlohmann::json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("params")) throw ArgumentError("space definition lacks 'params'");
    list = &doc.at("params");
  }
  if (!list->is_array()) throw ArgumentError("'params' must be a list");
  std::vector<ParamSpec> params;
  for (const auto& item : *list) {
    ParamSpec p;
    try {
      p.name = item.at("name").get<std::string>();
      p.kind = parse_kind(item.value("kind", std::string("continuous")), p.name);
      p.lower = item.at("lower").get<double>();
      p.upper = item.at("upper").get<double>();
      p.scale = parse_scale(item.value("scale", std::string("linear")), p.name);
    } catch (const nlohmann::json::exception& e) {
      throw ArgumentError(std::string("malformed parameter entry: ") + e.what());
    }
    params.push_back(std::move(p));
  }
  return SearchSpace(std::move(params));
}

SearchSpace SearchSpace::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open space file '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ArgumentError("space file '" + path.string() + "': " + e.what());
  }
  return from_json(doc);
}

nlohmann::json SearchSpace::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& p : params_) {
    nlohmann::json item{{"name", p.name},
                        {"kind", to_string(p.kind)},
                        {"scale", to_string(p.scale)}};
    if (p.kind == ParamKind::integer) {
      item["lower"] = static_cast<std::int64_t>(p.lower);
      item["upper"] = static_cast<std::int64_t>(p.upper);
    } else {
      item["lower"] = p.lower;
      item["upper"] = p.upper;
    }
    list.push_back(std::move(item));
  }
  return nlohmann::json{{"params", std::move(list)}};
}

SearchSpace SearchSpace::unit_cube(std::size_t dim) {
  std::vector<ParamSpec> params;
  for (std::size_t d = 0; d < dim; ++d) {
    params.push_back({"x" + std::to_string(d + 1), ParamKind::continuous, 0.0, 1.0, Scale::linear});
  }
  return SearchSpace(std::move(params));
}

bool SearchSpace::operator==(const SearchSpace& other) const {
  if (dim() != other.dim()) return false;
  for (std::size_t d = 0; d < dim(); ++d) {
    const auto& a = params_[d];
    const auto& b = other.params_[d];
    if (a.name != b.name || a.kind != b.kind || a.lower != b.lower || a.upper != b.upper ||
        a.scale != b.scale) {
      return false;
    }
  }
  return true;
}

std::vector<double> normalize(const SearchSpace& space, std::span<const double> raw) {
  if (raw.size() != space.dim()) {
    throw ArgumentError("normalize: expected " + std::to_string(space.dim()) + " values, got " +
                        std::to_string(raw.size()));
  }
  std::vector<double> unit(raw.size());
  for (std::size_t d = 0; d < raw.size(); ++d) {
    const auto& p = space.param(d);
    const double v = raw[d];
    if (!(v >= p.lower && v <= p.upper)) {
      throw BoundsError("parameter '" + p.name + "' value " + std::to_string(v) +
                        " outside [" + std::to_string(p.lower) + ", " + std::to_string(p.upper) + "]");
    }
    if (p.scale == Scale::logarithmic) {
      unit[d] = (std::log(v) - std::log(p.lower)) / (std::log(p.upper) - std::log(p.lower));
    } else {
      unit[d] = (v - p.lower) / (p.upper - p.lower);
    }
    unit[d] = std::clamp(unit[d], 0.0, 1.0);
  }
  return unit;
}

std::vector<double> denormalize(const SearchSpace& space, std::span<const double> unit) {
  if (unit.size() != space.dim()) {
    throw ArgumentError("denormalize: expected " + std::to_string(space.dim()) + " coordinates, got " +
                        std::to_string(unit.size()));
  }
  std::vector<double> raw(unit.size());
  for (std::size_t d = 0; d < unit.size(); ++d) {
    const auto& p = space.param(d);
    const double u = unit[d];
    if (!(u >= 0.0 && u <= 1.0)) {
      throw DomainError("parameter '" + p.name + "': unit coordinate " + std::to_string(u) +
                        " outside [0, 1]");
    }
    double v;
    if (p.scale == Scale::logarithmic) {
      v = std::exp(std::log(p.lower) + u * (std::log(p.upper) - std::log(p.lower)));
    } else {
      v = p.lower + u * (p.upper - p.lower);
    }
    if (u == 0.0) v = p.lower;
    if (u == 1.0) v = p.upper;
    if (p.kind == ParamKind::integer) v = std::round(v);
    raw[d] = std::clamp(v, p.lower, p.upper);
  }
  return raw;
}

Configuration make_configuration(const SearchSpace& space, std::span<const double> unit) {
  return Configuration{std::vector<double>(unit.begin(), unit.end()), denormalize(space, unit)};
}

std::vector<Configuration> lhs_sample(const SearchSpace& space, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ArgumentError("lhs_sample: n must be at least 1");
  const std::size_t dim = space.dim();
  Rng rng(seed, {0x1b5});
  std::vector<std::vector<double>> units(n, std::vector<double>(dim));
  std::vector<std::size_t> perm(n);
  for (std::size_t d = 0; d < dim; ++d) {
    std::iota(perm.begin(), perm.end(), 0);
    // Fisher-Yates with the platform-stable stream.
    for (std::size_t i = n - 1; i > 0; --i) {
      std::swap(perm[i], perm[rng.below(i + 1)]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (static_cast<double>(perm[i]) + rng.uniform()) / static_cast<double>(n);
      units[i][d] = std::min(u, std::nextafter(static_cast<double>(perm[i] + 1) / n, 0.0));
    }
  }
  std::vector<Configuration> out;
  out.reserve(n);
  for (auto& u : units) out.push_back(make_configuration(space, u));
  return out;
}

std::string to_string(ParamKind kind) { return kind == ParamKind::integer ? "integer" : "continuous"; }

std::string to_string(Scale scale) { return scale == Scale::logarithmic ? "logarithmic" : "linear"; }

}  // namespace houses
