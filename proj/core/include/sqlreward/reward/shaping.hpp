#pragma once

#include <array>
#include <string>
#include <string_view>

namespace sqlreward::reward {

/// φ(x) = λx + (1−λ)βx^γ.
struct ShapingParams {
  double lambda = 0.05;
  double beta = 0.79;
  double gamma = 0.20;
};

inline constexpr ShapingParams kPresetS1{0.15, 1.0, 0.35};
inline constexpr ShapingParams kPresetS2{0.30, 0.85, 0.55};
inline constexpr ShapingParams kPresetS3{0.05, 0.79, 0.20};
inline constexpr ShapingParams kPresetS4{0.60, 0.50, 0.98};

struct NamedPreset {
  std::string_view name;
  ShapingParams params;
};

inline constexpr std::array<NamedPreset, 4> kPresets{
    {{"S1", kPresetS1}, {"S2", kPresetS2}, {"S3", kPresetS3}, {"S4", kPresetS4}}};

inline constexpr std::string_view kDefaultPreset = "S3";

/// Throws DataError for an unknown name.
ShapingParams preset(std::string_view name);

/// Throws DomainError unless λ ∈ [0,1], β > 0, γ > 0.
void validate(const ShapingParams& p);

/// Throws DomainError for x outside [0,1].
double shape(double x, const ShapingParams& p);

}  // namespace sqlreward::reward
