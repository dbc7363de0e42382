#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "sqlreward/exec/executor.hpp"

namespace sqlreward::selection {

struct ExecutionGroup {
  std::string denotation_key;  // 16 hex digits of a hash of the canonical row set
  std::vector<std::size_t> members;
};

/// Groups ordered by their earliest member; members ascending.
struct ExecutionGroups {
  std::vector<ExecutionGroup> groups;
  std::vector<std::size_t> failed;
};

/// Pure grouping of already-executed candidates.
ExecutionGroups group_results(const std::vector<exec::ExecutionResult>& results);

/// Executes each candidate and groups the results.
ExecutionGroups group_by_execution(const std::vector<std::string>& candidates, const std::filesystem::path& db,
                                   int timeout_ms, const exec::Executor& executor = exec::Executor{},
                                   std::vector<exec::ExecutionResult>* results = nullptr);

struct VoteResult {
  std::size_t index = 0;
  std::string sql;
  bool no_executable = false;
  std::size_t group_size = 0;
};

/// Largest group wins; ties go to the group holding the earliest candidate;
/// its earliest member is chosen. Without any group: the first candidate
/// that parses, else the first candidate, flagged no_executable.
/// An empty candidate list yields no_executable with an empty sql.
VoteResult majority_vote(const ExecutionGroups& groups, const std::vector<std::string>& candidates);

/// 1 iff chosen matches gold. Throws GoldExecutionFailed.
int ex_metric(const std::string& chosen, const std::string& gold, const std::filesystem::path& db, int timeout_ms,
              const exec::Executor& executor = exec::Executor{}, exec::MatchMode mode = exec::MatchMode::Set);

/// 1 iff any candidate matches gold. Throws GoldExecutionFailed.
int pass_at_k(const std::vector<std::string>& candidates, const std::string& gold, const std::filesystem::path& db,
              int timeout_ms, const exec::Executor& executor = exec::Executor{},
              exec::MatchMode mode = exec::MatchMode::Set);

/// Mean count of non-failed groups; 0 for no questions.
double mean_exec_groups(const std::vector<ExecutionGroups>& per_question);

}  // namespace sqlreward::selection
