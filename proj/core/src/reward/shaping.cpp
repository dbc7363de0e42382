#include "sqlreward/reward/shaping.hpp"

#include <cmath>

#include "sqlreward/errors.hpp"

namespace sqlreward::reward {

ShapingParams preset(std::string_view name) {
  for (const auto& p : kPresets)
    if (p.name == name) return p.params;
  throw DataError("unknown shaping preset: " + std::string(name));
}

void validate(const ShapingParams& p) {
  if (!(p.lambda >= 0.0 && p.lambda <= 1.0)) throw DomainError("lambda must lie in [0,1]");
  if (!(p.beta > 0.0)) throw DomainError("beta must be positive");
  if (!(p.gamma > 0.0)) throw DomainError("gamma must be positive");
}

double shape(double x, const ShapingParams& p) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("shaping input must lie in [0,1]");
  return p.lambda * x + (1.0 - p.lambda) * p.beta * std::pow(x, p.gamma);
}

}  // namespace sqlreward::reward
