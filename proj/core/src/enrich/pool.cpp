#include "sqlreward/enrich/pool.hpp"

#include <cctype>
#include <set>

#include "sqlreward/errors.hpp"

namespace sqlreward::enrich {

std::vector<std::string> ReferencePool::references() const {
  std::vector<std::string> out;
  out.reserve(1 + variants.size());
  out.push_back(gold);
  out.insert(out.end(), variants.begin(), variants.end());
  return out;
}

std::string normalize_whitespace(std::string_view sql) {
  std::string out;
  bool pending_space = false;
  for (char c : sql) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

ReferencePool build_reference_pool(const std::string& gold, const std::vector<std::string>& candidates,
                                   const std::filesystem::path& db, int timeout_ms, const exec::Executor& executor,
                                   exec::MatchMode mode) {
  const auto gold_result = executor.run(db, gold, timeout_ms);
  if (!gold_result.ok()) throw GoldExecutionFailed(gold_result.error_message);

  ReferencePool pool;
  pool.gold = gold;
  pool.empty_gold = gold_result.rows->empty();
  std::set<std::string> seen{normalize_whitespace(gold)};
  for (const auto& cand : candidates) {
    const auto key = normalize_whitespace(cand);
    if (key.empty() || seen.count(key)) continue;
    const auto r = executor.run(db, cand, timeout_ms);
    if (!r.ok() || !exec::denotation_match(*r.rows, *gold_result.rows, mode)) continue;
    seen.insert(key);
    pool.variants.push_back(cand);
  }
  return pool;
}

AuditReport audit_pools(const std::vector<ReferencePool>& pools) {
  AuditReport report;
  report.total = pools.size();
  for (const auto& p : pools) {
    if (!p.empty_gold) continue;
    ++report.empty_gold_count;
    report.flagged_question_ids.push_back(p.question_id);
  }
  if (report.total > 0) {
    report.ratio = static_cast<double>(report.empty_gold_count) / static_cast<double>(report.total);
  }
  return report;
}

std::vector<std::string> reverify_pool(const ReferencePool& pool, const std::filesystem::path& db, int timeout_ms,
                                       const exec::Executor& executor, exec::MatchMode mode) {
  const auto gold = executor.run(db, pool.gold, timeout_ms);
  if (!gold.ok()) throw GoldExecutionFailed(gold.error_message);
  std::vector<std::string> stale;
  for (const auto& v : pool.variants) {
    const auto r = executor.run(db, v, timeout_ms);
    if (!r.ok() || !exec::denotation_match(*r.rows, *gold.rows, mode)) stale.push_back(v);
  }
  return stale;
}

}  // namespace sqlreward::enrich
