#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "sqlreward/memory/embedding.hpp"
#include "sqlreward/reward/reward.hpp"

namespace sqlreward::service {

using json = nlohmann::json;

/// One declarative file for every front end. Unset paths stay empty.
struct ServiceConfig {
  std::filesystem::path db_root;
  std::filesystem::path pools;  // JSONL reference pools keyed by question_id
  std::filesystem::path bank;   // memory snapshot, loaded at start and flushed at shutdown
  memory::ProviderConfig embedding;
  std::string preset = std::string(reward::kDefaultPreset);
  std::size_t k = memory::kDefaultTopK;
  memory::Scope scope = memory::Scope::CrossDB;
  bool memory_insert = true;
  int reward_timeout_ms = exec::kRewardTimeoutMs;
  int eval_timeout_ms = exec::kEvalTimeoutMs;
  exec::MatchMode match_mode = exec::MatchMode::Set;
  std::size_t threads = 0;       // 0 = hardware concurrency
  std::size_t per_db_limit = 0;  // 0 = uncapped
  std::string host = "127.0.0.1";
  std::uint16_t port = 8080;
};

/// Built-in defaults, then `file` (when given), then environment overrides
/// for deployment paths: SQLREWARD_DB_ROOT, SQLREWARD_POOLS, SQLREWARD_BANK,
/// SQLREWARD_EMBED_URL. Throws DataError for unknown keys or bad values.
ServiceConfig load_config(const std::optional<std::filesystem::path>& file);

/// Applies the keys present in `j` on top of `base`.
ServiceConfig merge_config(ServiceConfig base, const json& j);
void apply_env(ServiceConfig& config);
json to_json(const ServiceConfig& config);

/// Per-request `config_overrides`: {preset, k, scope, memory_insert, timeout}.
struct Overrides {
  std::optional<std::string> preset;
  std::optional<std::size_t> k;
  std::optional<memory::Scope> scope;
  std::optional<bool> memory_insert;
  std::optional<int> timeout_ms;
};

Overrides overrides_from_json(const json& j);

/// Request overrides win over the service config, which wins over defaults.
reward::RewardConfig resolve_reward_config(const ServiceConfig& config, const Overrides& overrides = {});

}  // namespace sqlreward::service
