#include <benchmark/benchmark.h>
#include <sqlite3.h>

#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>

#include "sqlreward/memory/bank.hpp"
#include "sqlreward/memory/quality_gate.hpp"
#include "sqlreward/reward/reward.hpp"
#include "sqlreward/selection/bleu.hpp"
#include "sqlreward/selection/voting.hpp"
#include "sqlreward/sql/atomic_ops.hpp"

namespace fs = std::filesystem;
namespace mem = sqlreward::memory;
namespace rw = sqlreward::reward;

namespace {

const char* kQuery =
    "WITH big AS (SELECT cid, SUM(total) AS s FROM orders GROUP BY cid HAVING SUM(total) > 20) "
    "SELECT c.name, b.s FROM cust c JOIN big b ON c.id = b.cid WHERE c.ct IN ('AU', 'US') "
    "AND c.id NOT IN (SELECT cid FROM orders WHERE total < 5) ORDER BY b.s DESC LIMIT 10";

const fs::path& toy_db() {
  static const fs::path path = [] {
    const fs::path p = fs::temp_directory_path() / "sqlreward_bench_toy.sqlite";
    fs::remove(p);
    sqlite3* db = nullptr;
    if (sqlite3_open(p.string().c_str(), &db) != SQLITE_OK) throw std::runtime_error("cannot create bench db");
    std::string script =
        "CREATE TABLE cust(id INTEGER PRIMARY KEY, name TEXT, ct TEXT);"
        "CREATE TABLE orders(id INTEGER PRIMARY KEY, cid INTEGER, total REAL, item TEXT);"
        "BEGIN;";
    const char* cts[] = {"AU", "US", "NZ", "UK"};
    for (int i = 1; i <= 500; ++i)
      script += "INSERT INTO cust VALUES(" + std::to_string(i) + ",'n" + std::to_string(i) + "','" + cts[i % 4] + "');";
    for (int i = 1; i <= 5000; ++i)
      script += "INSERT INTO orders VALUES(" + std::to_string(i) + "," + std::to_string(1 + i % 500) + "," +
                std::to_string((i * 37) % 113) + ".5,'it" + std::to_string(i % 20) + "');";
    script += "COMMIT;";
    char* err = nullptr;
    if (sqlite3_exec(db, script.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
      const std::string msg = err ? err : "unknown";
      sqlite3_free(err);
      sqlite3_close(db);
      throw std::runtime_error(msg);
    }
    sqlite3_close(db);
    return p;
  }();
  return path;
}

std::string trace(std::size_t words, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::string s;
  for (std::size_t i = 0; i < words; ++i) {
    s += (i % 9 == 0) ? "cust.name " : "w" + std::to_string(rng() % 400) + " ";
  }
  return s;
}

void BM_Decompose(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sqlreward::sql::decompose(kQuery));
}
BENCHMARK(BM_Decompose);

void BM_Jaccard(benchmark::State& state) {
  const auto a = sqlreward::sql::decompose(kQuery);
  const auto b = sqlreward::sql::decompose("SELECT c.name FROM cust c WHERE c.ct = 'AU' ORDER BY c.name LIMIT 10");
  for (auto _ : state) benchmark::DoNotOptimize(sqlreward::sql::jaccard(a, b));
}
BENCHMARK(BM_Jaccard);

void BM_Shape(benchmark::State& state) {
  int i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rw::shape(i / 1000.0, rw::kPresetS3));
    i = i == 1000 ? 0 : i + 1;
  }
}
BENCHMARK(BM_Shape);

void BM_Retrieve(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const std::size_t dim = mem::kDefaultDim;
  auto stub = std::make_shared<mem::StubProvider>(dim);
  mem::MemoryBank bank(stub, dim);
  std::mt19937 rng(1);
  std::normal_distribution<double> g;
  for (std::size_t i = 0; i < n; ++i) {
    mem::Vector e(dim);
    for (auto& x : e) x = g(rng);
    bank.add({"", "db" + std::to_string(i % 8), "t", std::move(e), "", mem::Source::Seed});
  }
  mem::Vector q(dim);
  for (auto& x : q) x = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(bank.retrieve(q, "db0", mem::kDefaultTopK, mem::Scope::CrossDB));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Retrieve)->Arg(100)->Arg(1000)->Arg(10000);

void BM_StubEmbed(benchmark::State& state) {
  mem::StubProvider stub(mem::kDefaultDim);
  const auto t = trace(300, 3);
  for (auto _ : state) benchmark::DoNotOptimize(stub.embed(t));
}
BENCHMARK(BM_StubEmbed);

void BM_QualityGate(benchmark::State& state) {
  const auto t = trace(static_cast<std::size_t>(state.range(0)), 5);
  const std::vector<std::string> cols{"cust.name", "cust.ct", "orders.total"};
  for (auto _ : state) benchmark::DoNotOptimize(mem::quality_gate(t, cols));
}
BENCHMARK(BM_QualityGate)->Arg(100)->Arg(1000);

void BM_SelfBleu(benchmark::State& state) {
  std::vector<std::string> traces;
  for (int i = 0; i < state.range(0); ++i) traces.push_back(trace(120, static_cast<std::uint32_t>(i)));
  for (auto _ : state) benchmark::DoNotOptimize(sqlreward::selection::self_bleu(traces));
}
BENCHMARK(BM_SelfBleu)->Arg(8)->Arg(30);

void BM_CompositeReward(benchmark::State& state) {
  auto stub = std::make_shared<mem::StubProvider>(256);
  mem::MemoryBank bank(stub, 256);
  for (int i = 0; i < 200; ++i) {
    const auto t = trace(60, static_cast<std::uint32_t>(100 + i));
    bank.add({"", "other", t, stub->embed(t), "", mem::Source::Seed});
  }
  sqlreward::exec::GoldCache cache;
  rw::ScoringContext ctx;
  ctx.gold_sql = "SELECT name FROM cust WHERE ct = 'AU'";
  ctx.db = toy_db();
  ctx.bank = &bank;
  ctx.db_id = "toy";
  ctx.config.memory_insert = false;
  ctx.gold_cache = &cache;
  const std::string rollout = "<think>" + trace(80, 9) + "</think>\nSELECT name FROM cust WHERE ct = 'US'";
  for (auto _ : state) benchmark::DoNotOptimize(rw::composite_reward(rollout, ctx));
}
BENCHMARK(BM_CompositeReward)->Unit(benchmark::kMicrosecond);

void BM_GroupByExecution(benchmark::State& state) {
  std::vector<std::string> cands;
  for (int i = 0; i < 30; ++i)
    cands.push_back(i % 3 == 0 ? "SELECT name FROM cust WHERE ct = 'AU'"
                               : "SELECT cid, SUM(total) FROM orders GROUP BY cid HAVING SUM(total) > " +
                                     std::to_string(i));
  for (auto _ : state) benchmark::DoNotOptimize(sqlreward::selection::group_by_execution(cands, toy_db(), 30000));
}
BENCHMARK(BM_GroupByExecution)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
