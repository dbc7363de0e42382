#include <iostream>

#include "common.hpp"
#include "sqlreward/errors.hpp"
#include "sqlreward/exec/executor.hpp"
#include "sqlreward/io/records.hpp"
#include "sqlreward/memory/bank.hpp"
#include "sqlreward/reward/reward.hpp"

namespace sqlreward::cli {

namespace fs = std::filesystem;

namespace {

struct MemoryArgs {
  std::optional<std::string> bank;
  std::string seeds;
  std::string out;
  std::string trace;
  std::string db_id;
  std::optional<std::string> db;
  std::vector<std::string> columns;
};

std::shared_ptr<memory::EmbeddingProvider> provider_for(const service::ServiceConfig& cfg) {
  return memory::make_provider(cfg.embedding);
}

fs::path bank_path(const MemoryArgs& a, const service::ServiceConfig& cfg) {
  fs::path p = a.bank ? fs::path(*a.bank) : cfg.bank;
  if (p.empty()) throw DataError("pass --bank or set bank in the config");
  return p;
}

std::unique_ptr<memory::MemoryBank> open_bank(const MemoryArgs& a, const service::ServiceConfig& cfg) {
  auto provider = provider_for(cfg);
  const auto dim = provider->dim();
  return memory::MemoryBank::load(bank_path(a, cfg), std::move(provider), dim);
}

void run_init(const MemoryArgs& a, const Common& common) {
  const auto cfg = common.load();
  auto provider = provider_for(cfg);
  const auto dim = provider->dim();
  const auto seeds = io::load_seeds(a.seeds);
  auto bank = memory::MemoryBank::init(seeds, std::move(provider), dim);
  bank->save(a.out);
  json out = io::to_json(bank->stats());
  out["seeds_read"] = seeds.size();
  print_json(out);
}

void run_insert(const MemoryArgs& a, const Common& common) {
  const auto cfg = common.load();
  auto bank = open_bank(a, cfg);
  std::vector<std::string> columns = a.columns;
  if (columns.empty()) {
    fs::path db;
    if (a.db) {
      db = *a.db;
    } else if (!cfg.db_root.empty()) {
      db = exec::resolve_db(cfg.db_root, a.db_id);
    } else {
      throw DataError("pass --db, --db-root or --schema-columns so the gate can count column mentions");
    }
    columns = reward::schema_column_names(db);
  }
  const auto trace = memory::extract_think(read_file(a.trace));
  const auto r = bank->insert(trace, a.db_id, columns);
  if (r.kind == memory::InsertOutcome::Kind::Inserted) bank->save(bank_path(a, cfg));
  json out = {{"result", memory::insert_kind_name(r.kind)},
              {"gate", io::to_json(r.gate)},
              {"similarity", r.similarity},
              {"bank_size", bank->size()}};
  if (!r.id.empty()) out["id"] = r.id;
  print_json(out);
}

void run_query(const MemoryArgs& a, const Common& common) {
  const auto cfg = common.load();
  auto bank = open_bank(a, cfg);
  const auto query = bank->provider().embed(memory::extract_think(read_file(a.trace)));
  const auto hits = bank->retrieve(query, a.db_id, cfg.k, cfg.scope);
  json rows = json::array();
  for (const auto& e : hits) {
    json j = io::to_json(e);
    j["cosine"] = memory::cosine(query, e.embedding);
    rows.push_back(std::move(j));
  }
  json out = {{"k", cfg.k}, {"scope", memory::scope_name(cfg.scope)}, {"results", rows}};
  if (!hits.empty()) out["centroid_cosine"] = memory::cosine(query, memory::centroid(hits));
  print_json(out);
}

void run_stats(const MemoryArgs& a, const Common& common) {
  const auto cfg = common.load();
  print_json(io::to_json(open_bank(a, cfg)->stats()));
}

}  // namespace

void register_memory_commands(CLI::App& app, Common& common) {
  auto a = std::make_shared<MemoryArgs>();
  auto* mem = app.add_subcommand("memory", "Reasoning-trace memory bank");
  mem->require_subcommand(1);
  mem->fallthrough();

  auto* init = mem->add_subcommand("init", "Build a bank from exec-correct seed traces");
  init->add_option("--seeds", a->seeds, "Seed rows {trace|output, db_id, exec_correct} (JSONL)")->required();
  init->add_option("--out", a->out, "Snapshot to write")->required();
  init->callback([a, &common] { run_init(*a, common); });

  auto* ins = mem->add_subcommand("insert", "Gate, dedup and append one trace");
  ins->add_option("--bank", a->bank, "Snapshot to update");
  ins->add_option("--trace", a->trace, "File holding the trace or a raw rollout")->required();
  ins->add_option("--db-id", a->db_id, "Database id of the trace")->required();
  ins->add_option("--db", a->db, "Database file used for schema column names");
  ins->add_option("--db-root", common.db_root, "Database root directory");
  ins->add_option("--schema-columns", a->columns, "Column names for the gate")->delimiter(',');
  ins->callback([a, &common] { run_insert(*a, common); });

  auto* q = mem->add_subcommand("query", "Retrieve the top-k traces for a query trace");
  q->add_option("--bank", a->bank, "Snapshot to read");
  q->add_option("--trace", a->trace, "File holding the trace or a raw rollout")->required();
  q->add_option("--db-id", a->db_id, "Database id of the query")->required();
  q->add_option("--k", common.k, "Neighbours to return")->check(CLI::PositiveNumber);
  q->add_option("--scope", common.scope, "CrossDB, SameOnly or Mixed");
  q->callback([a, &common] { run_query(*a, common); });

  auto* st = mem->add_subcommand("stats", "Print bank size and composition");
  st->add_option("--bank", a->bank, "Snapshot to read");
  st->callback([a, &common] { run_stats(*a, common); });
}

}  // namespace sqlreward::cli
