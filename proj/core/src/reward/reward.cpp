#include "sqlreward/reward/reward.hpp"

#include <algorithm>

#include "sqlreward/errors.hpp"
#include "sqlreward/sql/atomic_ops.hpp"

namespace sqlreward::reward {

std::string_view memory_action_name(MemoryAction a) {
  switch (a) {
    case MemoryAction::Skipped: return "Skipped";
    case MemoryAction::Inserted: return "Inserted";
    case MemoryAction::GateRejected: return "GateRejected";
    case MemoryAction::Duplicate: return "Duplicate";
  }
  return "Skipped";
}

int format_reward(const RolloutParse& p) { return p.format_valid ? 1 : 0; }

int execution_reward(exec::Outcome outcome) {
  switch (outcome) {
    case exec::Outcome::Failed: return 0;
    case exec::Outcome::ExecutedMismatch: return 1;
    case exec::Outcome::Match: return 2;
  }
  return 0;
}

double max_jaccard(std::string_view pred_sql, const std::vector<std::string>& references) {
  const auto pred = sql::decompose(pred_sql);
  double best = 0.0;
  for (const auto& ref : references) best = std::max(best, sql::jaccard(pred, sql::decompose(ref)));
  return best;
}

double atomic_reward(std::string_view pred_sql, const enrich::ReferencePool& pool, const ShapingParams& p) {
  return shape(max_jaccard(pred_sql, pool.references()), p);
}

MemoryRewardDetail memory_reward_detail(const RolloutParse& p, exec::Outcome outcome, const memory::MemoryBank* bank,
                                        std::string_view db_id, std::size_t k, memory::Scope scope) {
  MemoryRewardDetail d;
  if (!p.format_valid) return d;
  if (outcome == exec::Outcome::Match) {
    d.value = 1.0;
    d.cosine = 1.0;
    return d;
  }
  if (bank == nullptr || !p.think || p.think->empty()) {
    d.empty_retrieval = true;
    return d;
  }
  const auto query = bank->provider().embed(*p.think);
  const auto hits = bank->retrieve(query, db_id, k, scope);
  d.retrieved = hits.size();
  if (hits.empty()) {
    d.empty_retrieval = true;
    return d;
  }
  d.cosine = memory::cosine(query, memory::centroid(hits));
  d.value = std::clamp(d.cosine, 0.0, 1.0);
  return d;
}

double memory_reward(const RolloutParse& p, exec::Outcome outcome, const memory::MemoryBank* bank,
                     std::string_view db_id, std::size_t k, memory::Scope scope) {
  return memory_reward_detail(p, outcome, bank, db_id, k, scope).value;
}

std::vector<std::string> schema_column_names(const std::filesystem::path& db) {
  std::vector<std::string> out;
  for (const auto& c : exec::list_columns(db)) out.push_back(c.table + "." + c.column);
  return out;
}

RewardResult composite_reward(std::string_view rollout_text, const ScoringContext& ctx) {
  RewardResult r;
  r.parse = parse_rollout(rollout_text);
  auto& b = r.breakdown;
  if (!r.parse.format_valid) return r;

  const exec::Executor fallback;
  const exec::Executor& executor = ctx.executor ? *ctx.executor : fallback;
  const auto gold = ctx.gold_cache ? ctx.gold_cache->get(executor, ctx.db, ctx.gold_sql, ctx.config.timeout_ms)
                                   : executor.run(ctx.db, ctx.gold_sql, ctx.config.timeout_ms);
  if (!gold.ok()) throw GoldExecutionFailed(gold.error_message);
  const auto pred = executor.run(ctx.db, *r.parse.sql, ctx.config.timeout_ms);
  r.pred_status = pred.status;
  r.pred_error = pred.error_message;

  b.outcome = exec::classify_outcome(pred, gold, ctx.config.match_mode);
  b.format = format_reward(r.parse);
  b.exec = execution_reward(b.outcome);
  if (b.outcome != exec::Outcome::Match) {
    r.jaccard_max = ctx.pool ? max_jaccard(*r.parse.sql, ctx.pool->references())
                             : max_jaccard(*r.parse.sql, {ctx.gold_sql});
    b.atomic = shape(r.jaccard_max, ctx.config.shaping);
  }
  r.memory_detail =
      memory_reward_detail(r.parse, b.outcome, ctx.bank, ctx.db_id, ctx.config.k, ctx.config.scope);
  b.memory = r.memory_detail.value;
  b.total = b.format + b.exec + b.atomic + b.memory;

  if (b.outcome == exec::Outcome::Match && ctx.config.memory_insert && ctx.bank != nullptr && !r.parse.think->empty()) {
    const auto columns = ctx.schema_columns.empty() ? schema_column_names(ctx.db) : ctx.schema_columns;
    const auto ins =
        ctx.bank->insert(*r.parse.think, ctx.db_id, columns, ctx.config.gate, ctx.config.duplicate_threshold);
    r.gate_reason = ins.gate.reason;
    r.duplicate_similarity = ins.similarity;
    switch (ins.kind) {
      case memory::InsertOutcome::Kind::Inserted:
        r.memory_action = MemoryAction::Inserted;
        r.inserted_id = ins.id;
        break;
      case memory::InsertOutcome::Kind::GateRejected: r.memory_action = MemoryAction::GateRejected; break;
      case memory::InsertOutcome::Kind::Duplicate: r.memory_action = MemoryAction::Duplicate; break;
    }
  }
  return r;
}

}  // namespace sqlreward::reward
