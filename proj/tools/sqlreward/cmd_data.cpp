#include <iostream>

#include "common.hpp"
#include "sqlreward/enrich/batch.hpp"
#include "sqlreward/errors.hpp"
#include "sqlreward/io/records.hpp"
#include "sqlreward/selection/evaluate.hpp"

namespace sqlreward::cli {

namespace {

struct EnrichArgs {
  std::string dataset;
  std::string candidates;
  std::string out;
  std::optional<std::string> audit;
};

void run_enrich(const EnrichArgs& a, const Common& common) {
  const auto cfg = common.load();
  if (cfg.db_root.empty()) throw DataError("--db-root is required");
  enrich::EnrichOptions opts;
  opts.timeout_ms = cfg.eval_timeout_ms;
  opts.threads = cfg.threads;
  opts.match_mode = cfg.match_mode;
  const exec::Executor executor(cfg.per_db_limit);
  const auto pools = enrich::enrich_dataset(io::load_dataset(a.dataset), io::load_candidate_rows(a.candidates),
                                            cfg.db_root, opts, executor);
  io::save_pools(a.out, pools);
  const json report = io::to_json(enrich::audit_pools(pools));
  if (a.audit) io::write_json(*a.audit, report);
  print_json(report);
}

struct EvalArgs {
  std::string dataset;
  std::string candidates;
  std::optional<std::string> report;
};

void run_eval(const EvalArgs& a, const Common& common) {
  const auto cfg = common.load();
  if (cfg.db_root.empty()) throw DataError("--db-root is required");
  selection::EvalOptions opts;
  opts.timeout_ms = cfg.eval_timeout_ms;
  opts.threads = cfg.threads;
  opts.match_mode = cfg.match_mode;
  const exec::Executor executor(cfg.per_db_limit);
  const auto report = selection::evaluate(io::load_dataset(a.dataset), io::load_candidate_sets(a.candidates),
                                          cfg.db_root, opts, executor);
  json full = selection::to_json(report);
  if (a.report) io::write_json(*a.report, full);
  full.erase("per_question");
  print_json(full);
}

}  // namespace

void register_data_commands(CLI::App& app, Common& common) {
  auto ea = std::make_shared<EnrichArgs>();
  auto* en = app.add_subcommand("enrich", "Build verified reference pools from sampled candidates");
  en->add_option("--dataset", ea->dataset, "BIRD or Spider style dataset (JSONL or JSON array)")->required();
  en->add_option("--candidates", ea->candidates, "Candidate rows {question_id, db_id, sql} (JSONL)")->required();
  en->add_option("--db-root", common.db_root, "Database root directory");
  en->add_option("--out", ea->out, "Output pools (JSONL)")->required();
  en->add_option("--audit", ea->audit, "Also write the empty-gold audit here (JSON)");
  en->add_option("--timeout", common.timeout_ms, "Per-query timeout in milliseconds")->check(CLI::PositiveNumber);
  en->add_option("--threads", common.threads, "Worker threads (0 = all cores)");
  en->add_option("--match-mode", common.match_mode, "set, multiset or ordered");
  en->callback([ea, &common] { run_enrich(*ea, common); });

  auto va = std::make_shared<EvalArgs>();
  auto* ev = app.add_subcommand("eval", "Majority-vote evaluation: EX, Pass@K, execution groups, self-BLEU");
  ev->add_option("--dataset", va->dataset, "BIRD or Spider style dataset (JSONL or JSON array)")->required();
  ev->add_option("--candidates", va->candidates, "Candidate sets {question_id, db_id, candidates, traces?}")
      ->required();
  ev->add_option("--db-root", common.db_root, "Database root directory");
  ev->add_option("--report", va->report, "Write the full report, with per-question rows (JSON)");
  ev->add_option("--timeout", common.timeout_ms, "Per-query timeout in milliseconds")->check(CLI::PositiveNumber);
  ev->add_option("--threads", common.threads, "Worker threads (0 = all cores)");
  ev->add_option("--match-mode", common.match_mode, "set, multiset or ordered");
  ev->callback([va, &common] { run_eval(*va, common); });
}

}  // namespace sqlreward::cli
