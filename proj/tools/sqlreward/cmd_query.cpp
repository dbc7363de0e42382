#include <iostream>
#include <sstream>

#include "common.hpp"
#include "sqlreward/errors.hpp"
#include "sqlreward/exec/executor.hpp"
#include "sqlreward/io/records.hpp"
#include "sqlreward/memory/bank.hpp"
#include "sqlreward/reward/reward.hpp"
#include "sqlreward/selection/evaluate.hpp"
#include "sqlreward/selection/voting.hpp"
#include "sqlreward/service/service.hpp"
#include "sqlreward/sql/atomic_ops.hpp"
#include "sqlreward/sql/parser.hpp"

namespace sqlreward::cli {

namespace fs = std::filesystem;

namespace {

struct DecomposeArgs {
  std::string sql;
  bool as_json = false;
};

void run_decompose(const DecomposeArgs& a) {
  const std::string text = text_or_file(a.sql);
  const auto set = sql::decompose(text);
  if (!set.parse_ok) {
    sql::parse_sql(text);  // rethrows the ParseError with its position
    throw DataError("SQL could not be decomposed");
  }
  if (a.as_json) {
    json ops = json::array();
    for (const auto& op : set.ops) ops.push_back({{"kind", sql::kind_name(op.kind)}, {"args", op.args}});
    print_json(ops);
    return;
  }
  for (const auto& r : set.sorted_renderings()) std::cout << r << '\n';
}

struct ExecArgs {
  std::string db;
  std::string sql;
  std::optional<int> timeout_ms;
};

void run_exec(const ExecArgs& a, const Common& common) {
  const auto cfg = common.load();
  const int timeout = a.timeout_ms.value_or(cfg.eval_timeout_ms);
  print_json(io::to_json(exec::execute_sql(a.db, text_or_file(a.sql), timeout)));
}

struct ScoreArgs {
  std::optional<std::string> db;
  std::optional<std::string> db_id;
  std::optional<std::string> gold;
  std::optional<std::string> pool;
  std::optional<std::string> question_id;
  std::optional<std::string> bank;
  std::string rollout;
  bool no_insert = false;
  bool save_bank = false;
};

enrich::ReferencePool pick_pool(const fs::path& file, const std::optional<std::string>& question_id,
                                const std::optional<std::string>& gold) {
  const auto pools = io::load_pools(file);
  if (question_id) {
    for (const auto& p : pools)
      if (p.question_id == *question_id) return p;
    throw PoolMissing(*question_id);
  }
  if (gold) {
    const auto key = enrich::normalize_whitespace(*gold);
    for (const auto& p : pools)
      if (enrich::normalize_whitespace(p.gold) == key) return p;
  }
  if (pools.size() == 1) return pools.front();
  throw PoolMissing(file.string() + " (pass --question-id)");
}

void run_score(const ScoreArgs& a, const Common& common) {
  auto cfg = common.load();
  fs::path db;
  if (a.db) {
    db = *a.db;
  } else if (a.db_id && !cfg.db_root.empty()) {
    db = exec::resolve_db(cfg.db_root, *a.db_id);
  } else {
    throw DataError("pass --db, or --db-id with a database root");
  }

  std::optional<enrich::ReferencePool> pool;
  if (a.pool) pool = pick_pool(*a.pool, a.question_id, a.gold ? std::optional(text_or_file(*a.gold)) : std::nullopt);

  reward::ScoringContext ctx;
  if (a.gold) {
    ctx.gold_sql = text_or_file(*a.gold);
  } else if (pool) {
    ctx.gold_sql = pool->gold;
  } else {
    throw DataError("pass --gold or --pool");
  }
  if (pool && pool->gold.empty()) pool->gold = ctx.gold_sql;

  std::unique_ptr<memory::MemoryBank> bank;
  const fs::path bank_path = a.bank ? fs::path(*a.bank) : cfg.bank;
  if (!bank_path.empty()) {
    auto provider = memory::make_provider(cfg.embedding);
    const auto dim = provider->dim();
    bank = memory::MemoryBank::load(bank_path, std::move(provider), dim);
  }

  service::Overrides o;
  if (a.no_insert) o.memory_insert = false;
  ctx.db = db;
  ctx.pool = pool ? &*pool : nullptr;
  ctx.bank = bank.get();
  ctx.db_id = a.db_id.value_or(pool ? pool->db_id : db.stem().string());
  ctx.config = service::resolve_reward_config(cfg, o);

  const auto r = reward::composite_reward(read_file(a.rollout), ctx);
  if (a.save_bank && bank && r.memory_action == reward::MemoryAction::Inserted) bank->save(bank_path);

  service::ScoreResponse resp;
  resp.breakdown = r.breakdown;
  resp.memory_action = r.memory_action;
  if (r.memory_action == reward::MemoryAction::GateRejected) resp.gate_reason = r.gate_reason;
  json out = service::to_json(resp);
  out.erase("id");
  out.erase("elapsed_ms");
  out["details"] = {{"jaccard_max", r.jaccard_max},
                    {"pred_status", exec::status_name(r.pred_status)},
                    {"pred_error", r.pred_error},
                    {"memory_cosine", r.memory_detail.cosine},
                    {"retrieved", r.memory_detail.retrieved},
                    {"empty_retrieval", r.memory_detail.empty_retrieval}};
  if (!r.inserted_id.empty()) out["details"]["inserted_id"] = r.inserted_id;
  print_json(out);
}

struct VoteArgs {
  std::string db;
  std::optional<std::string> candidates;
  std::vector<std::string> sql;
  std::optional<std::string> gold;
};

std::vector<std::string> read_candidates(const std::string& file) {
  const std::string text = read_file(file);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') {
    try {
      return json::parse(text).get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw DataError(file + ": expected a JSON array of SQL strings: " + e.what());
    }
  }
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos) out.push_back(line);
  return out;
}

void run_vote(const VoteArgs& a, const Common& common) {
  const auto cfg = common.load();
  std::vector<std::string> cands = a.candidates ? read_candidates(*a.candidates) : std::vector<std::string>{};
  cands.insert(cands.end(), a.sql.begin(), a.sql.end());
  if (cands.empty()) throw DataError("no candidates: pass --candidates or --sql");
  const exec::Executor executor(cfg.per_db_limit);
  const auto groups = selection::group_by_execution(cands, a.db, cfg.eval_timeout_ms, executor);
  const auto vote = selection::majority_vote(groups, cands);
  json out = {{"chosen",
               {{"index", vote.index},
                {"sql", vote.sql},
                {"no_executable", vote.no_executable},
                {"group_size", vote.group_size}}},
              {"groups", selection::to_json(groups)}};
  if (a.gold) {
    const auto gold = text_or_file(*a.gold);
    out["ex"] = selection::ex_metric(vote.sql, gold, a.db, cfg.eval_timeout_ms, executor, cfg.match_mode);
    out["pass_at_k"] = selection::pass_at_k(cands, gold, a.db, cfg.eval_timeout_ms, executor, cfg.match_mode);
  }
  print_json(out);
}

}  // namespace

void register_query_commands(CLI::App& app, Common& common) {
  auto da = std::make_shared<DecomposeArgs>();
  auto* dec = app.add_subcommand("decompose", "Print the canonical atomic operations of a query");
  dec->add_option("sql", da->sql, "SQL text or a file holding it")->required();
  dec->add_flag("--json", da->as_json, "Emit {kind, args} objects");
  dec->callback([da] { run_decompose(*da); });

  auto ea = std::make_shared<ExecArgs>();
  auto* ex = app.add_subcommand("exec", "Execute read-only SQL and print status, elapsed time and rows");
  ex->add_option("--db", ea->db, "SQLite database file")->required();
  ex->add_option("sql", ea->sql, "SQL text or a file holding it")->required();
  ex->add_option("--timeout", ea->timeout_ms, "Timeout in milliseconds")->check(CLI::PositiveNumber);
  ex->callback([ea, &common] { run_exec(*ea, common); });

  auto sa = std::make_shared<ScoreArgs>();
  auto* sc = app.add_subcommand("score", "Score one rollout and print its reward breakdown");
  sc->add_option("--db", sa->db, "SQLite database file");
  sc->add_option("--db-id", sa->db_id, "Database id (resolved under --db-root; also the memory scope key)");
  sc->add_option("--db-root", common.db_root, "Database root directory");
  sc->add_option("--gold", sa->gold, "Gold SQL text or file");
  sc->add_option("--pool", sa->pool, "Reference pools (JSONL)");
  sc->add_option("--question-id", sa->question_id, "Pool to use from --pool");
  sc->add_option("--bank", sa->bank, "Memory bank snapshot");
  sc->add_option("--rollout", sa->rollout, "File holding the raw model output")->required();
  sc->add_option("--preset", common.preset, "Shaping preset S1..S4");
  sc->add_option("--k", common.k, "Retrieved neighbours")->check(CLI::PositiveNumber);
  sc->add_option("--scope", common.scope, "CrossDB, SameOnly or Mixed");
  sc->add_option("--timeout", common.timeout_ms, "Timeout in milliseconds")->check(CLI::PositiveNumber);
  sc->add_flag("--no-insert", sa->no_insert, "Never insert the trace into memory");
  sc->add_flag("--save-bank", sa->save_bank, "Write the bank back when a trace was inserted");
  sc->callback([sa, &common] { run_score(*sa, common); });

  auto va = std::make_shared<VoteArgs>();
  auto* vo = app.add_subcommand("vote", "Group candidates by execution result and pick the majority");
  vo->add_option("--db", va->db, "SQLite database file")->required();
  vo->add_option("--candidates", va->candidates, "JSON array or one SQL per line");
  vo->add_option("--sql", va->sql, "Candidate SQL (repeatable)");
  vo->add_option("--gold", va->gold, "Gold SQL text or file; adds ex and pass_at_k");
  vo->add_option("--timeout", common.timeout_ms, "Timeout in milliseconds")->check(CLI::PositiveNumber);
  vo->callback([va, &common] { run_vote(*va, common); });
}

}  // namespace sqlreward::cli
