#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace sqlreward::memory {

enum class GateReason { Ok, TooShort, TooLong, LowDensity, FewColumns, LowDiversity };

std::string_view gate_reason_name(GateReason reason);

struct GateMetrics {
  std::size_t token_count = 0;
  double schema_density = 0.0;
  std::size_t distinct_columns = 0;
  double bigram_uniqueness = 0.0;
};

struct GateReport {
  bool accepted = false;
  GateReason reason = GateReason::TooShort;
  GateMetrics metrics;
};

struct GateThresholds {
  std::size_t min_tokens = 30;
  std::size_t max_tokens = 2000;
  double min_density = 0.05;
  std::size_t min_columns = 2;
  double min_bigram_uniqueness = 0.60;
};

/// Metrics over whitespace tokens, case-insensitive. A token mentions a
/// column when, stripped of surrounding punctuation, it equals a column
/// name or has the form `qualifier.column`. `schema_columns` entries may be
/// bare or `table.column`.
GateMetrics gate_metrics(std::string_view trace, const std::vector<std::string>& schema_columns);

/// First failing check in the order length, density, columns, diversity.
GateReport quality_gate(std::string_view trace, const std::vector<std::string>& schema_columns,
                        const GateThresholds& thresholds = {});

}  // namespace sqlreward::memory
