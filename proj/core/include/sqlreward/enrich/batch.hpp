#pragma once

#include <filesystem>
#include <vector>

#include "sqlreward/enrich/pool.hpp"
#include "sqlreward/io/records.hpp"

namespace sqlreward::enrich {

struct EnrichOptions {
  int timeout_ms = exec::kEvalTimeoutMs;
  std::size_t threads = 0;  // 0 = hardware concurrency
  exec::MatchMode match_mode = exec::MatchMode::Set;
};

/// One pool per dataset item, in dataset order. Candidates are matched by
/// question_id. Throws DbNotFound / GoldExecutionFailed naming the question.
std::vector<ReferencePool> enrich_dataset(const std::vector<io::DatasetItem>& dataset,
                                          const std::vector<io::CandidateRow>& candidates,
                                          const std::filesystem::path& db_root, const EnrichOptions& options = {},
                                          const exec::Executor& executor = exec::Executor{});

}  // namespace sqlreward::enrich
