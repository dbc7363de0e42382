#include "sqlreward/selection/evaluate.hpp"

#include <map>

#include "sqlreward/errors.hpp"
#include "sqlreward/parallel.hpp"
#include "sqlreward/selection/bleu.hpp"

namespace sqlreward::selection {

EvalReport evaluate(const std::vector<io::DatasetItem>& dataset, const std::vector<io::CandidateSet>& candidates,
                    const std::filesystem::path& db_root, const EvalOptions& options,
                    const exec::Executor& executor) {
  std::map<std::string, const io::CandidateSet*> by_question;
  for (const auto& c : candidates) by_question.emplace(c.question_id, &c);

  EvalReport report;
  report.per_question.resize(dataset.size());
  std::vector<ExecutionGroups> groups(dataset.size());

  parallel_for(dataset.size(), options.threads, [&](std::size_t i) {
    const auto& item = dataset[i];
    auto& rec = report.per_question[i];
    rec.question_id = item.question_id;
    rec.db_id = item.db_id;
    auto it = by_question.find(item.question_id);
    if (it == by_question.end()) {
      rec.no_executable = true;
      return;
    }
    const auto& set = *it->second;
    rec.num_candidates = set.candidates.size();
    try {
      const auto db = exec::resolve_db(db_root, item.db_id);
      const auto gold = executor.run(db, item.sql, options.timeout_ms);
      if (!gold.ok()) throw GoldExecutionFailed(gold.error_message);
      std::vector<exec::ExecutionResult> results;
      groups[i] = group_by_execution(set.candidates, db, options.timeout_ms, executor, &results);
      const auto vote = majority_vote(groups[i], set.candidates);
      rec.chosen_index = vote.index;
      rec.chosen_sql = vote.sql;
      rec.no_executable = vote.no_executable;
      rec.exec_groups = groups[i].groups.size();
      rec.failed = groups[i].failed.size();
      for (std::size_t c = 0; c < results.size(); ++c) {
        if (exec::classify_outcome(results[c], gold, options.match_mode) != exec::Outcome::Match) continue;
        rec.pass = 1;
        if (!vote.no_executable && c == vote.index) rec.ex = 1;
      }
      if (set.traces.size() >= 2) rec.self_bleu = self_bleu(set.traces);
    } catch (const Error& e) {
      rec.error = e.code() + ": " + e.what();
    }
  });

  double ex = 0, pass = 0, bleu = 0;
  std::size_t bleu_n = 0;
  std::vector<ExecutionGroups> scored_groups;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& rec = report.per_question[i];
    if (!rec.error.empty()) {
      ++report.errors;
      continue;
    }
    ++report.questions;
    ex += rec.ex;
    pass += rec.pass;
    if (rec.num_candidates > 0) scored_groups.push_back(groups[i]);
    if (rec.self_bleu) {
      bleu += *rec.self_bleu;
      ++bleu_n;
    }
  }
  for (const auto& c : candidates) {
    bool known = false;
    for (const auto& d : dataset) known = known || d.question_id == c.question_id;
    if (!known) ++report.unmatched_candidate_sets;
  }
  if (report.questions) {
    report.ex = ex / static_cast<double>(report.questions);
    report.pass_at_k = pass / static_cast<double>(report.questions);
  }
  report.mean_exec_groups = mean_exec_groups(scored_groups);
  if (bleu_n) report.self_bleu = bleu / static_cast<double>(bleu_n);
  return report;
}

io::json to_json(const ExecutionGroups& g) {
  io::json groups = io::json::array();
  for (const auto& grp : g.groups) groups.push_back({{"denotation_key", grp.denotation_key}, {"members", grp.members}});
  return {{"groups", groups}, {"failed", g.failed}};
}

io::json to_json(const EvalReport& r) {
  io::json rows = io::json::array();
  for (const auto& q : r.per_question) {
    io::json row = {{"question_id", q.question_id},
                    {"db_id", q.db_id},
                    {"num_candidates", q.num_candidates},
                    {"chosen_index", q.chosen_index},
                    {"chosen_sql", q.chosen_sql},
                    {"no_executable", q.no_executable},
                    {"ex", q.ex},
                    {"pass", q.pass},
                    {"exec_groups", q.exec_groups},
                    {"failed", q.failed},
                    {"self_bleu", q.self_bleu ? io::json(*q.self_bleu) : io::json(nullptr)}};
    if (!q.error.empty()) row["error"] = q.error;
    rows.push_back(std::move(row));
  }
  return {{"ex", r.ex},
          {"pass_at_k", r.pass_at_k},
          {"mean_exec_groups", r.mean_exec_groups},
          {"self_bleu", r.self_bleu},
          {"questions", r.questions},
          {"errors", r.errors},
          {"unmatched_candidate_sets", r.unmatched_candidate_sets},
          {"per_question", rows}};
}

}  // namespace sqlreward::selection
