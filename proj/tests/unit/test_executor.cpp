#include <gtest/gtest.h>

#include <thread>

#include "fixtures.hpp"
#include "sqlreward/errors.hpp"
#include "sqlreward/exec/executor.hpp"

namespace exec = sqlreward::exec;
using sqlreward::testing::TempDir;

class ExecutorTest : public ::testing::Test {
 protected:
  TempDir dir;
  std::filesystem::path db = sqlreward::testing::make_toy_db(dir / "toy.db");
};

TEST_F(ExecutorTest, ConstantQuery) {
  auto r = exec::execute_sql(db, "SELECT 1", 1000);
  ASSERT_EQ(r.status, exec::Status::Ok);
  ASSERT_TRUE(r.rows.has_value());
  ASSERT_EQ(r.rows->size(), 1u);
  EXPECT_EQ(std::get<std::int64_t>((*r.rows)[0][0]), 1);
  EXPECT_TRUE(r.error_message.empty());
}

TEST_F(ExecutorTest, SyntaxErrorClassification) {
  for (const char* q : {"SELEC 1", "SELECT FROM WHERE", "SELECT 'abc", "answer is 42, not SQL", "SELECT (1"}) {
    auto r = exec::execute_sql(db, q, 1000);
    EXPECT_EQ(r.status, exec::Status::SyntaxError) << q << ": " << r.error_message;
    EXPECT_FALSE(r.rows.has_value());
    EXPECT_FALSE(r.error_message.empty());
  }
}

TEST_F(ExecutorTest, MissingTableIsRuntimeError) {
  auto r = exec::execute_sql(db, "SELECT x FROM missing_table", 1000);
  EXPECT_EQ(r.status, exec::Status::RuntimeError);
  EXPECT_NE(r.error_message.find("no such table"), std::string::npos);
  EXPECT_EQ(exec::execute_sql(db, "SELECT nope FROM cust", 1000).status, exec::Status::RuntimeError);
}

TEST_F(ExecutorTest, MultiStatementRejected) {
  EXPECT_EQ(exec::execute_sql(db, "SELECT 1; SELECT 2", 1000).status, exec::Status::SyntaxError);
  EXPECT_EQ(exec::execute_sql(db, "SELECT 1;  -- done", 1000).status, exec::Status::Ok);
  EXPECT_EQ(exec::execute_sql(db, "", 1000).status, exec::Status::SyntaxError);
}

TEST_F(ExecutorTest, WritesNeverApply) {
  const auto before = sqlreward::testing::file_hash(db);
  EXPECT_NE(exec::execute_sql(db, "DELETE FROM cust", 1000).status, exec::Status::Ok);
  EXPECT_NE(exec::execute_sql(db, "DROP TABLE orders", 1000).status, exec::Status::Ok);
  EXPECT_NE(exec::execute_sql(db, "INSERT INTO cust VALUES (9,'x','y')", 1000).status, exec::Status::Ok);
  EXPECT_EQ(exec::execute_sql(db, "SELECT COUNT(*) FROM cust", 1000).rows->at(0).at(0), exec::Value{std::int64_t{4}});
  EXPECT_EQ(sqlreward::testing::file_hash(db), before);
}

TEST_F(ExecutorTest, MissingDatabaseThrows) {
  EXPECT_THROW(exec::execute_sql(dir / "nope.db", "SELECT 1", 1000), sqlreward::DbNotFound);
}

TEST_F(ExecutorTest, TimeoutWithinTwiceTheBudget) {
  const auto t0 = std::chrono::steady_clock::now();
  auto r = exec::execute_sql(db, "WITH RECURSIVE c(n) AS (SELECT 1 UNION ALL SELECT n + 1 FROM c) SELECT COUNT(*) FROM c",
                             200);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(r.status, exec::Status::Timeout);
  EXPECT_LT(ms, 400.0);
  EXPECT_LT(r.elapsed_ms, 400.0);
}

TEST_F(ExecutorTest, Determinism) {
  const char* q = "SELECT c.name, SUM(o.total) FROM cust c JOIN orders o ON o.cid = c.id GROUP BY c.name ORDER BY 1";
  auto a = exec::execute_sql(db, q, 1000);
  auto b = exec::execute_sql(db, q, 1000);
  ASSERT_TRUE(a.ok());
  EXPECT_EQ(*a.rows, *b.rows);
}

TEST(DenotationMatch, SetSemantics) {
  using exec::Row;
  using exec::Value;
  std::vector<Row> p{{Value{std::int64_t{1}}, Value{std::string("a")}}, {Value{std::int64_t{2}}, Value{std::string("b")}}};
  std::vector<Row> g{{Value{std::int64_t{2}}, Value{std::string("b")}}, {Value{std::int64_t{1}}, Value{std::string("a")}}};
  EXPECT_TRUE(exec::denotation_match(p, g, false));
  EXPECT_FALSE(exec::denotation_match(p, g, true));
  EXPECT_TRUE(exec::denotation_match({}, {}, false));
  EXPECT_TRUE(exec::denotation_match({{Value{1.0}}}, {{Value{std::int64_t{1}}}}, false));
  EXPECT_FALSE(exec::denotation_match({{Value{1.5}}}, {{Value{std::int64_t{1}}}}, false));
  EXPECT_FALSE(exec::denotation_match({{Value{std::string("1")}}}, {{Value{std::int64_t{1}}}}, false));
  EXPECT_TRUE(exec::denotation_match({{Value{}}}, {{Value{}}}, false));
  // duplicates collapse under set semantics only
  std::vector<Row> dup{{Value{std::int64_t{1}}}, {Value{std::int64_t{1}}}};
  std::vector<Row> one{{Value{std::int64_t{1}}}};
  EXPECT_TRUE(exec::denotation_match(dup, one, exec::MatchMode::Set));
  EXPECT_FALSE(exec::denotation_match(dup, one, exec::MatchMode::Multiset));
}

TEST(DenotationMatch, KeyAgreesWithSetMatch) {
  using exec::Row;
  using exec::Value;
  std::vector<Row> a{{Value{std::int64_t{3}}}, {Value{2.0}}, {Value{std::int64_t{3}}}};
  std::vector<Row> b{{Value{std::int64_t{2}}}, {Value{3.0}}};
  EXPECT_EQ(exec::denotation_key(a), exec::denotation_key(b));
  EXPECT_TRUE(exec::denotation_match(a, b));
}

TEST_F(ExecutorTest, ClassifyOutcome) {
  auto gold = exec::execute_sql(db, "SELECT name FROM cust WHERE ct = 'AU'", 1000);
  EXPECT_EQ(exec::classify_outcome(exec::execute_sql(db, "SELECT name FROM cust WHERE ct = 'AU' ORDER BY name DESC", 1000), gold),
            exec::Outcome::Match);
  EXPECT_EQ(exec::classify_outcome(exec::execute_sql(db, "SELECT name FROM cust", 1000), gold),
            exec::Outcome::ExecutedMismatch);
  EXPECT_EQ(exec::classify_outcome(exec::execute_sql(db, "SELEC name", 1000), gold), exec::Outcome::Failed);
  auto timeout = exec::ExecutionResult{};
  timeout.status = exec::Status::Timeout;
  timeout.error_message = "timeout";
  EXPECT_EQ(exec::classify_outcome(timeout, gold), exec::Outcome::Failed);
  EXPECT_THROW(exec::classify_outcome(gold, exec::execute_sql(db, "SELECT * FROM nope", 1000)),
               sqlreward::GoldExecutionFailed);
}

TEST_F(ExecutorTest, ListColumnsAndResolve) {
  auto cols = exec::list_columns(db);
  ASSERT_EQ(cols.size(), 7u);
  EXPECT_EQ(cols[0].table, "cust");
  EXPECT_EQ(cols[0].column, "id");
  std::filesystem::create_directories(dir / "toy");
  sqlreward::testing::make_toy_db(dir / "toy" / "toy.sqlite");
  EXPECT_EQ(exec::resolve_db(dir.path(), "toy"), dir / "toy" / "toy.sqlite");
  std::filesystem::remove_all(dir / "toy");
  EXPECT_EQ(exec::resolve_db(dir.path(), "toy"), dir / "toy.db");
  EXPECT_THROW(exec::resolve_db(dir.path(), "absent"), sqlreward::DbNotFound);
  EXPECT_THROW(exec::resolve_db(dir.path(), "../etc"), sqlreward::DbNotFound);
}

TEST_F(ExecutorTest, PerDatabaseCapIsHonoured) {
  exec::Executor capped(2);
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int i = 0; i < 8; ++i)
    threads.emplace_back([&] {
      if (capped.run(db, "SELECT COUNT(*) FROM orders", 1000).ok()) ++ok;
    });
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok.load(), 8);
}

TEST_F(ExecutorTest, GoldCacheMemoizes) {
  exec::Executor ex;
  exec::GoldCache cache;
  auto a = cache.get(ex, db, "SELECT 1", 1000);
  auto b = cache.get(ex, db, "SELECT 1", 1000);
  EXPECT_EQ(*a.rows, *b.rows);
  EXPECT_EQ(cache.size(), 1u);
}
