#include "sqlreward/selection/voting.hpp"

#include <cstdio>
#include <map>

#include "sqlreward/errors.hpp"
#include "sqlreward/sql/parser.hpp"

namespace sqlreward::selection {

namespace {

std::string hex_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool parses(const std::string& sql) {
  try {
    sql::parse_sql(sql);
    return true;
  } catch (const ParseError&) {
    return false;
  }
}

}  // namespace

ExecutionGroups group_results(const std::vector<exec::ExecutionResult>& results) {
  ExecutionGroups g;
  std::map<std::string, std::size_t> slot;  // canonical denotation -> group index
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].ok()) {
      g.failed.push_back(i);
      continue;
    }
    auto key = exec::denotation_key(*results[i].rows);
    auto [it, fresh] = slot.emplace(key, g.groups.size());
    if (fresh) g.groups.push_back({hex_hash(key), {}});
    g.groups[it->second].members.push_back(i);
  }
  return g;
}

ExecutionGroups group_by_execution(const std::vector<std::string>& candidates, const std::filesystem::path& db,
                                   int timeout_ms, const exec::Executor& executor,
                                   std::vector<exec::ExecutionResult>* results) {
  std::vector<exec::ExecutionResult> local;
  local.reserve(candidates.size());
  for (const auto& c : candidates) local.push_back(executor.run(db, c, timeout_ms));
  auto groups = group_results(local);
  if (results) *results = std::move(local);
  return groups;
}

VoteResult majority_vote(const ExecutionGroups& groups, const std::vector<std::string>& candidates) {
  VoteResult v;
  const ExecutionGroup* best = nullptr;
  for (const auto& g : groups.groups) {
    if (best == nullptr || g.members.size() > best->members.size() ||
        (g.members.size() == best->members.size() && g.members.front() < best->members.front())) {
      best = &g;
    }
  }
  if (best != nullptr) {
    v.index = best->members.front();
    v.sql = candidates.at(v.index);
    v.group_size = best->members.size();
    return v;
  }
  v.no_executable = true;
  if (candidates.empty()) return v;
  v.index = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (parses(candidates[i])) {
      v.index = i;
      break;
    }
  }
  v.sql = candidates[v.index];
  return v;
}

int ex_metric(const std::string& chosen, const std::string& gold, const std::filesystem::path& db, int timeout_ms,
              const exec::Executor& executor, exec::MatchMode mode) {
  const auto g = executor.run(db, gold, timeout_ms);
  const auto p = executor.run(db, chosen, timeout_ms);
  return exec::classify_outcome(p, g, mode) == exec::Outcome::Match ? 1 : 0;
}

int pass_at_k(const std::vector<std::string>& candidates, const std::string& gold, const std::filesystem::path& db,
              int timeout_ms, const exec::Executor& executor, exec::MatchMode mode) {
  const auto g = executor.run(db, gold, timeout_ms);
  if (!g.ok()) throw GoldExecutionFailed(g.error_message);
  for (const auto& c : candidates) {
    if (exec::classify_outcome(executor.run(db, c, timeout_ms), g, mode) == exec::Outcome::Match) return 1;
  }
  return 0;
}

double mean_exec_groups(const std::vector<ExecutionGroups>& per_question) {
  if (per_question.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& g : per_question) sum += static_cast<double>(g.groups.size());
  return sum / static_cast<double>(per_question.size());
}

}  // namespace sqlreward::selection
