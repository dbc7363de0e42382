#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sqlreward/enrich/pool.hpp"
#include "sqlreward/exec/executor.hpp"
#include "sqlreward/memory/bank.hpp"
#include "sqlreward/reward/reward.hpp"
#include "sqlreward/service/config.hpp"

namespace sqlreward::service {

struct ScoreRequest {
  json id;  // echoed verbatim
  std::string question_id;
  std::string db_id;
  std::string rollout;
  std::optional<std::string> gold_sql;  // falls back to the pool's gold
  /// null: the loaded pool for question_id, else {gold}.  string: key into
  /// the loaded pools.  array of SQL or {gold?, variants}: inline pool.
  json pool_ref;
  Overrides overrides;
};

/// Throws DataError naming the offending field.
ScoreRequest request_from_json(const json& j);
json to_json(const ScoreRequest& r);

struct ScoreResponse {
  json id;
  std::optional<reward::RewardBreakdown> breakdown;  // absent on error
  reward::MemoryAction memory_action = reward::MemoryAction::Skipped;
  std::optional<memory::GateReason> gate_reason;  // set when GateRejected
  double elapsed_ms = 0.0;
  std::string error_code;  // empty on success
  std::string error_message;

  bool ok() const { return error_code.empty(); }
};

json to_json(const ScoreResponse& r);
json error_object(const json& id, const std::string& code, const std::string& message);

/// Shared scoring core behind the stdio and HTTP transports. Thread-safe:
/// concurrent batches share the executor, gold cache and memory bank.
class RewardService {
 public:
  /// Loads pools and the bank snapshot named by the config.
  explicit RewardService(ServiceConfig config);
  RewardService(ServiceConfig config, std::shared_ptr<memory::EmbeddingProvider> provider);

  ScoreResponse score(const ScoreRequest& request);
  /// Never throws; a request that fails to decode becomes an error response.
  json score_json(const json& request);
  /// Same order as `requests`; failures stay per item.
  std::vector<json> score_batch(const std::vector<json>& requests);

  /// {trace|rollout, db_id, schema_columns?}. Throws DataError.
  json insert_memory(const json& body);
  json memory_stats() const;
  json health() const;

  /// Writes the bank snapshot when a bank path is configured.
  void flush() const;

  const ServiceConfig& config() const { return config_; }
  memory::MemoryBank& bank() { return *bank_; }
  std::size_t pool_count() const { return pools_.size(); }

 private:
  const std::vector<std::string>& schema_for(const std::filesystem::path& db);

  ServiceConfig config_;
  exec::Executor executor_;
  exec::GoldCache gold_cache_;
  std::unique_ptr<memory::MemoryBank> bank_;
  std::map<std::string, enrich::ReferencePool> pools_;
  std::mutex schema_mu_;
  std::map<std::string, std::vector<std::string>> schemas_;
};

}  // namespace sqlreward::service
