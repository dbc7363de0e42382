#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqlreward/enrich/pool.hpp"
#include "sqlreward/exec/executor.hpp"
#include "sqlreward/memory/bank.hpp"
#include "sqlreward/reward/rollout.hpp"
#include "sqlreward/reward/shaping.hpp"

namespace sqlreward::reward {

struct RewardBreakdown {
  double format = 0.0;  // 0 or 1
  double exec = 0.0;    // 0, 1 or 2
  double atomic = 0.0;  // [0, φ(1)]
  double memory = 0.0;  // [0, 1]
  double total = 0.0;   // format + exec + atomic + memory
  exec::Outcome outcome = exec::Outcome::Failed;
};

int format_reward(const RolloutParse& p);
int execution_reward(exec::Outcome outcome);

/// max Jaccard between pred and each reference; 0 for an empty pool.
double max_jaccard(std::string_view pred_sql, const std::vector<std::string>& references);
double atomic_reward(std::string_view pred_sql, const enrich::ReferencePool& pool, const ShapingParams& p);

struct MemoryRewardDetail {
  double value = 0.0;
  double cosine = 0.0;  // before clamping
  std::size_t retrieved = 0;
  bool empty_retrieval = false;
};

/// 0 when the format is invalid, 1 on Match, else the clamped cosine
/// between the trace embedding and the centroid of its top-k neighbours.
/// A missing bank, an empty trace or an empty retrieval gives 0.
MemoryRewardDetail memory_reward_detail(const RolloutParse& p, exec::Outcome outcome, const memory::MemoryBank* bank,
                                        std::string_view db_id, std::size_t k, memory::Scope scope);
double memory_reward(const RolloutParse& p, exec::Outcome outcome, const memory::MemoryBank* bank,
                     std::string_view db_id, std::size_t k, memory::Scope scope);

struct RewardConfig {
  ShapingParams shaping = kPresetS3;
  std::size_t k = memory::kDefaultTopK;
  memory::Scope scope = memory::Scope::CrossDB;
  bool memory_insert = true;
  int timeout_ms = exec::kRewardTimeoutMs;
  exec::MatchMode match_mode = exec::MatchMode::Set;
  memory::GateThresholds gate;
  double duplicate_threshold = memory::kDuplicateThreshold;
};

struct ScoringContext {
  std::string gold_sql;
  std::filesystem::path db;
  const enrich::ReferencePool* pool = nullptr;  // null means {gold}
  memory::MemoryBank* bank = nullptr;           // null disables memory
  std::string db_id;
  RewardConfig config;
  const exec::Executor* executor = nullptr;  // null uses an uncapped one
  exec::GoldCache* gold_cache = nullptr;
  /// Column names for the insert gate; read from the database when empty.
  std::vector<std::string> schema_columns;
};

enum class MemoryAction { Skipped, Inserted, GateRejected, Duplicate };

std::string_view memory_action_name(MemoryAction a);

struct RewardResult {
  RewardBreakdown breakdown;
  RolloutParse parse;
  double jaccard_max = 0.0;
  exec::Status pred_status = exec::Status::SyntaxError;
  std::string pred_error;
  MemoryRewardDetail memory_detail;
  MemoryAction memory_action = MemoryAction::Skipped;
  memory::GateReason gate_reason = memory::GateReason::Ok;
  double duplicate_similarity = 0.0;
  std::string inserted_id;
};

/// Parse, execute, score, and (on Match with memory_insert) insert the trace.
/// Throws GoldExecutionFailed, DbNotFound.
RewardResult composite_reward(std::string_view rollout_text, const ScoringContext& ctx);

/// "table.column" names for every column of the database.
std::vector<std::string> schema_column_names(const std::filesystem::path& db);

}  // namespace sqlreward::reward
