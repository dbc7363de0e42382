#include "sqlreward/service/service.hpp"

#include <chrono>

#include "sqlreward/errors.hpp"
#include "sqlreward/io/records.hpp"
#include "sqlreward/parallel.hpp"

namespace sqlreward::service {

namespace fs = std::filesystem;

namespace {

std::string required_string(const json& j, const char* key) {
  if (!j.contains(key)) throw DataError(std::string("missing field '") + key + "'");
  if (!j[key].is_string()) throw DataError(std::string("field '") + key + "' must be a string");
  return j[key].get<std::string>();
}

enrich::ReferencePool inline_pool(const json& ref, const ScoreRequest& r) {
  enrich::ReferencePool p;
  p.question_id = r.question_id;
  p.db_id = r.db_id;
  json variants = ref;
  if (ref.is_object()) {
    if (ref.contains("gold")) {
      if (!ref["gold"].is_string()) throw DataError("pool_ref.gold must be a string");
      p.gold = ref["gold"].get<std::string>();
    }
    variants = ref.value("variants", json::array());
  }
  if (!variants.is_array()) throw DataError("pool_ref variants must be an array of SQL strings");
  for (const auto& v : variants) {
    if (!v.is_string()) throw DataError("pool_ref variants must be an array of SQL strings");
    p.variants.push_back(v.get<std::string>());
  }
  if (p.gold.empty() && r.gold_sql) p.gold = *r.gold_sql;
  return p;
}

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

ScoreRequest request_from_json(const json& j) {
  if (!j.is_object()) throw DataError("request must be a JSON object");
  ScoreRequest r;
  r.id = j.value("id", json());
  if (j.contains("question_id") && !j["question_id"].is_null()) r.question_id = io::id_string(j["question_id"]);
  r.db_id = required_string(j, "db_id");
  r.rollout = required_string(j, "rollout");
  if (j.contains("gold_sql") && !j["gold_sql"].is_null()) r.gold_sql = required_string(j, "gold_sql");
  r.pool_ref = j.value("pool_ref", json());
  if (j.contains("config_overrides")) r.overrides = overrides_from_json(j["config_overrides"]);
  return r;
}

json to_json(const ScoreRequest& r) {
  json j = {{"id", r.id}, {"question_id", r.question_id}, {"db_id", r.db_id}, {"rollout", r.rollout}};
  if (r.gold_sql) j["gold_sql"] = *r.gold_sql;
  if (!r.pool_ref.is_null()) j["pool_ref"] = r.pool_ref;
  json o = json::object();
  if (r.overrides.preset) o["preset"] = *r.overrides.preset;
  if (r.overrides.k) o["k"] = *r.overrides.k;
  if (r.overrides.scope) o["scope"] = memory::scope_name(*r.overrides.scope);
  if (r.overrides.memory_insert) o["memory_insert"] = *r.overrides.memory_insert;
  if (r.overrides.timeout_ms) o["timeout"] = *r.overrides.timeout_ms;
  if (!o.empty()) j["config_overrides"] = o;
  return j;
}

json error_object(const json& id, const std::string& code, const std::string& message) {
  return {{"id", id}, {"error", {{"code", code}, {"message", message}}}};
}

json to_json(const ScoreResponse& r) {
  if (!r.ok()) {
    json j = error_object(r.id, r.error_code, r.error_message);
    j["elapsed_ms"] = r.elapsed_ms;
    return j;
  }
  json b = io::to_json(*r.breakdown);
  const json outcome = b["outcome"];
  b.erase("outcome");
  json j = {{"id", r.id},
            {"breakdown", b},
            {"outcome", outcome},
            {"memory_action", reward::memory_action_name(r.memory_action)},
            {"elapsed_ms", r.elapsed_ms}};
  if (r.gate_reason) j["gate_reason"] = memory::gate_reason_name(*r.gate_reason);
  return j;
}

RewardService::RewardService(ServiceConfig config)
    : RewardService(config, memory::make_provider(config.embedding)) {}

RewardService::RewardService(ServiceConfig config, std::shared_ptr<memory::EmbeddingProvider> provider)
    : config_(std::move(config)), executor_(config_.per_db_limit) {
  const std::size_t dim = provider->dim();
  bank_ = config_.bank.empty() ? std::make_unique<memory::MemoryBank>(std::move(provider), dim)
                               : memory::MemoryBank::load(config_.bank, std::move(provider), dim);
  if (!config_.pools.empty())
    for (auto& p : io::load_pools(config_.pools)) pools_[p.question_id] = std::move(p);
}

const std::vector<std::string>& RewardService::schema_for(const fs::path& db) {
  std::lock_guard lock(schema_mu_);
  auto it = schemas_.find(db.string());
  if (it == schemas_.end()) it = schemas_.emplace(db.string(), reward::schema_column_names(db)).first;
  return it->second;
}

ScoreResponse RewardService::score(const ScoreRequest& r) {
  const auto start = std::chrono::steady_clock::now();
  ScoreResponse resp;
  resp.id = r.id;
  try {
    if (config_.db_root.empty()) throw DbNotFound("no db_root configured");
    const fs::path db = exec::resolve_db(config_.db_root, r.db_id);

    std::optional<enrich::ReferencePool> inline_ref;
    const enrich::ReferencePool* pool = nullptr;
    if (r.pool_ref.is_string()) {
      const auto key = r.pool_ref.get<std::string>();
      auto it = pools_.find(key);
      if (it == pools_.end()) throw PoolMissing(key);
      pool = &it->second;
    } else if (r.pool_ref.is_array() || r.pool_ref.is_object()) {
      inline_ref = inline_pool(r.pool_ref, r);
      pool = &*inline_ref;
    } else if (!r.pool_ref.is_null()) {
      throw DataError("pool_ref must be a key, an array of SQL strings, or an object");
    } else if (auto it = pools_.find(r.question_id); !r.question_id.empty() && it != pools_.end()) {
      pool = &it->second;
    }

    reward::ScoringContext ctx;
    if (r.gold_sql) {
      ctx.gold_sql = *r.gold_sql;
    } else if (pool != nullptr && !pool->gold.empty()) {
      ctx.gold_sql = pool->gold;
    } else {
      throw DataError("request has no gold_sql and no pool gold");
    }
    ctx.db = db;
    ctx.pool = pool;
    ctx.bank = bank_.get();
    ctx.db_id = r.db_id;
    ctx.config = resolve_reward_config(config_, r.overrides);
    ctx.executor = &executor_;
    ctx.gold_cache = &gold_cache_;
    ctx.schema_columns = schema_for(db);

    const auto result = reward::composite_reward(r.rollout, ctx);
    resp.breakdown = result.breakdown;
    resp.memory_action = result.memory_action;
    if (result.memory_action == reward::MemoryAction::GateRejected) resp.gate_reason = result.gate_reason;
  } catch (const Error& e) {
    resp.error_code = e.code();
    resp.error_message = e.what();
  } catch (const std::exception& e) {
    resp.error_code = "InternalError";
    resp.error_message = e.what();
  }
  resp.elapsed_ms = ms_since(start);
  return resp;
}

json RewardService::score_json(const json& request) {
  try {
    return to_json(score(request_from_json(request)));
  } catch (const Error& e) {
    const json id = request.is_object() ? request.value("id", json()) : json();
    return error_object(id, e.code(), e.what());
  } catch (const std::exception& e) {
    return error_object(json(), "InternalError", e.what());
  }
}

std::vector<json> RewardService::score_batch(const std::vector<json>& requests) {
  std::vector<json> out(requests.size());
  std::size_t threads = worker_count(config_.threads, requests.size());
  if (config_.per_db_limit > 0) threads = std::min(threads, config_.per_db_limit);
  parallel_for(requests.size(), threads, [&](std::size_t i) { out[i] = score_json(requests[i]); });
  return out;
}

json RewardService::insert_memory(const json& body) {
  if (!body.is_object()) throw DataError("insert body must be a JSON object");
  std::string trace;
  if (body.contains("trace")) {
    trace = required_string(body, "trace");
  } else {
    trace = memory::extract_think(required_string(body, "rollout"));
  }
  const std::string db_id = required_string(body, "db_id");
  std::vector<std::string> columns;
  if (body.contains("schema_columns")) {
    try {
      columns = body["schema_columns"].get<std::vector<std::string>>();
    } catch (const json::exception&) {
      throw DataError("schema_columns must be an array of strings");
    }
  } else {
    if (config_.db_root.empty()) throw DbNotFound("no db_root configured");
    columns = schema_for(exec::resolve_db(config_.db_root, db_id));
  }
  const auto out = bank_->insert(trace, db_id, columns);
  json j = {{"result", memory::insert_kind_name(out.kind)},
            {"gate", io::to_json(out.gate)},
            {"similarity", out.similarity},
            {"bank_size", bank_->size()}};
  if (!out.id.empty()) j["id"] = out.id;
  return j;
}

json RewardService::memory_stats() const {
  json j = io::to_json(bank_->stats());
  j["scope_default"] = memory::scope_name(config_.scope);
  j["k"] = config_.k;
  j["provider"] = bank_->provider().name();
  return j;
}

json RewardService::health() const { return {{"status", "ok"}, {"bank_size", bank_->size()}}; }

void RewardService::flush() const {
  if (!config_.bank.empty()) bank_->save(config_.bank);
}

}  // namespace sqlreward::service
