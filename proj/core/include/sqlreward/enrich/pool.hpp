#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sqlreward/exec/executor.hpp"

namespace sqlreward::enrich {

/// Gold SQL plus execution-verified variants for one question.
struct ReferencePool {
  std::string question_id;
  std::string db_id;
  std::string gold;
  std::vector<std::string> variants;
  bool empty_gold = false;

  /// Gold first, then variants.
  std::vector<std::string> references() const;
  std::size_t effective_size() const { return 1 + variants.size(); }
};

/// Trim and collapse whitespace runs to one space.
std::string normalize_whitespace(std::string_view sql);

/// Keeps candidates whose denotation matches gold, dropping text duplicates
/// of gold or of an earlier kept candidate. Throws GoldExecutionFailed.
ReferencePool build_reference_pool(const std::string& gold, const std::vector<std::string>& candidates,
                                   const std::filesystem::path& db, int timeout_ms,
                                   const exec::Executor& executor = exec::Executor{},
                                   exec::MatchMode mode = exec::MatchMode::Set);

struct AuditReport {
  std::size_t total = 0;
  std::size_t empty_gold_count = 0;
  double ratio = 0.0;
  std::vector<std::string> flagged_question_ids;
};

/// Advisory: pools are reported, never pruned.
AuditReport audit_pools(const std::vector<ReferencePool>& pools);

/// Re-executes every variant; returns the variants that no longer match.
std::vector<std::string> reverify_pool(const ReferencePool& pool, const std::filesystem::path& db, int timeout_ms,
                                       const exec::Executor& executor = exec::Executor{},
                                       exec::MatchMode mode = exec::MatchMode::Set);

}  // namespace sqlreward::enrich
