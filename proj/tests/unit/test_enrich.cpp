#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "sqlreward/enrich/batch.hpp"
#include "sqlreward/enrich/pool.hpp"
#include "sqlreward/errors.hpp"
#include "sqlreward/io/records.hpp"
#include "sqlreward/reward/reward.hpp"

namespace enrich = sqlreward::enrich;
namespace io = sqlreward::io;
using sqlreward::testing::TempDir;

class EnrichTest : public ::testing::Test {
 protected:
  TempDir dir;
  std::filesystem::path db = sqlreward::testing::make_toy_db(dir / "toy.db");
};

TEST_F(EnrichTest, FilterAndDedup) {
  const std::string gold = "SELECT name FROM cust WHERE ct = 'AU'";
  auto pool = enrich::build_reference_pool(
      gold, {gold, "SELECT name FROM", "SELECT name FROM cust", "SELECT  name FROM cust\nWHERE ct = 'AU'"}, db, 1000);
  EXPECT_TRUE(pool.variants.empty());  // both matches are textual copies of gold
  EXPECT_EQ(pool.effective_size(), 1u);
  EXPECT_FALSE(pool.empty_gold);

  auto pool2 = enrich::build_reference_pool(
      gold,
      {"SELECT name FROM cust WHERE ct IN ('AU')", "SELECT name FROM cust WHERE ct IN ('AU') ",
       "SELECT c.name FROM cust c WHERE c.ct = 'AU' ORDER BY 1"},
      db, 1000);
  EXPECT_EQ(pool2.variants.size(), 2u);
  EXPECT_EQ(pool2.references().front(), gold);
  EXPECT_TRUE(enrich::reverify_pool(pool2, db, 1000).empty());
}

TEST_F(EnrichTest, EmptyGoldAndNoCandidates) {
  auto pool = enrich::build_reference_pool("SELECT name FROM cust WHERE ct = 'XX'", {"SELECT name FROM cust WHERE 1=0"},
                                           db, 1000);
  EXPECT_TRUE(pool.empty_gold);
  EXPECT_EQ(pool.variants.size(), 1u);
  auto bare = enrich::build_reference_pool("SELECT 1", {}, db, 1000);
  EXPECT_EQ(bare.effective_size(), 1u);
  EXPECT_THROW(enrich::build_reference_pool("SELECT * FROM nope", {}, db, 1000), sqlreward::GoldExecutionFailed);
}

TEST(Audit, Ratios) {
  std::vector<enrich::ReferencePool> pools(10);
  for (int i = 0; i < 10; ++i) pools[i].question_id = "q" + std::to_string(i);
  EXPECT_EQ(enrich::audit_pools(pools).ratio, 0.0);
  pools[3].empty_gold = pools[7].empty_gold = true;
  auto r = enrich::audit_pools(pools);
  EXPECT_DOUBLE_EQ(r.ratio, 0.2);
  EXPECT_EQ(r.flagged_question_ids, (std::vector<std::string>{"q3", "q7"}));
  std::vector<enrich::ReferencePool> big(9428);
  for (int i = 0; i < 670; ++i) big[i * 14].empty_gold = true;
  auto b = enrich::audit_pools(big);
  EXPECT_EQ(b.empty_gold_count, 670u);
  EXPECT_NEAR(b.ratio, 0.0711, 5e-5);
  EXPECT_EQ(enrich::audit_pools({}).ratio, 0.0);
}

TEST_F(EnrichTest, MonotoneUnderMoreCandidates) {
  const std::string gold = "SELECT name FROM cust WHERE ct = 'AU'";
  std::vector<std::string> cands{"SELECT name FROM cust WHERE ct IN ('AU')", "SELECT 1"};
  auto small = enrich::build_reference_pool(gold, cands, db, 1000);
  cands.push_back("SELECT name FROM cust WHERE ct = 'AU' AND 1");
  auto larger = enrich::build_reference_pool(gold, cands, db, 1000);
  for (const auto& v : small.variants)
    EXPECT_NE(std::find(larger.variants.begin(), larger.variants.end(), v), larger.variants.end());
}

TEST_F(EnrichTest, PoolsRoundTripAndDatasetBatch) {
  std::filesystem::create_directories(dir / "root" / "toy");
  sqlreward::testing::make_toy_db(dir / "root" / "toy" / "toy.sqlite");
  sqlreward::testing::write_text(dir / "ds.jsonl",
                                 "{\"question_id\": 1, \"db_id\": \"toy\", \"question\": \"q\", \"evidence\": \"\", "
                                 "\"SQL\": \"SELECT name FROM cust WHERE ct = 'AU'\"}\n"
                                 "{\"db_id\": \"toy\", \"question\": \"q2\", \"query\": \"SELECT COUNT(*) FROM cust\"}\n");
  sqlreward::testing::write_text(dir / "cands.jsonl",
                                 "{\"question_id\": \"1\", \"db_id\": \"toy\", \"sql\": \"SELECT name FROM cust WHERE ct "
                                 "IN ('AU')\"}\n{\"question_id\": \"1\", \"db_id\": \"toy\", \"sql\": \"SELECT 1\"}\n");
  auto ds = io::load_dataset(dir / "ds.jsonl");
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds[0].question_id, "1");
  EXPECT_EQ(ds[1].question_id, "1");  // row index fallback
  ds[1].question_id = "second";
  auto pools = enrich::enrich_dataset(ds, io::load_candidate_rows(dir / "cands.jsonl"), dir / "root");
  ASSERT_EQ(pools.size(), 2u);
  EXPECT_EQ(pools[0].variants.size(), 1u);
  EXPECT_EQ(pools[1].variants.size(), 0u);
  io::save_pools(dir / "pools.jsonl", pools);
  auto back = io::load_pools(dir / "pools.jsonl");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].gold, pools[0].gold);
  EXPECT_EQ(back[0].variants, pools[0].variants);
  EXPECT_EQ(back[1].question_id, "second");
}

TEST(Records, MalformedJsonlNamesLine) {
  TempDir dir;
  sqlreward::testing::write_text(dir / "bad.jsonl", "{\"a\": 1}\n{oops\n");
  try {
    io::read_jsonl(dir / "bad.jsonl");
    FAIL();
  } catch (const sqlreward::DataError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
  }
}
