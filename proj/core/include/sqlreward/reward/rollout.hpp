#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace sqlreward::reward {

struct RolloutParse {
  std::string raw;
  std::optional<std::string> think;
  std::optional<std::string> sql;
  bool format_valid = false;
};

/// Valid iff the text is one `<think>...</think>` block (only whitespace
/// before it) followed by non-empty SQL. A surrounding ``` fence on the SQL
/// is stripped. think and sql are set only when valid.
RolloutParse parse_rollout(std::string_view text);

}  // namespace sqlreward::reward
