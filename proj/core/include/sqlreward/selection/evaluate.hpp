#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sqlreward/io/records.hpp"
#include "sqlreward/selection/voting.hpp"

namespace sqlreward::selection {

struct QuestionRecord {
  std::string question_id;
  std::string db_id;
  std::size_t num_candidates = 0;
  std::size_t chosen_index = 0;
  std::string chosen_sql;
  bool no_executable = false;
  int ex = 0;
  int pass = 0;
  std::size_t exec_groups = 0;
  std::size_t failed = 0;
  std::optional<double> self_bleu;
  std::string error;  // non-empty when the question could not be scored
};

struct EvalReport {
  double ex = 0.0;
  double pass_at_k = 0.0;
  double mean_exec_groups = 0.0;
  double self_bleu = 0.0;  // mean over questions with at least 2 traces
  std::size_t questions = 0;  // scored questions (denominator)
  std::size_t errors = 0;
  std::size_t unmatched_candidate_sets = 0;
  std::vector<QuestionRecord> per_question;
};

struct EvalOptions {
  int timeout_ms = exec::kEvalTimeoutMs;
  std::size_t threads = 0;
  exec::MatchMode match_mode = exec::MatchMode::Set;
};

/// Majority-vote evaluation in dataset order. Questions without candidates
/// score 0; questions whose database or gold fails are reported as errors
/// and excluded from the ratios.
EvalReport evaluate(const std::vector<io::DatasetItem>& dataset, const std::vector<io::CandidateSet>& candidates,
                    const std::filesystem::path& db_root, const EvalOptions& options = {},
                    const exec::Executor& executor = exec::Executor{});

io::json to_json(const EvalReport& report);
io::json to_json(const ExecutionGroups& groups);

}  // namespace sqlreward::selection
