#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "sqlreward/errors.hpp"
#include "sqlreward/reward/reward.hpp"

namespace rw = sqlreward::reward;
namespace mem = sqlreward::memory;
namespace exec = sqlreward::exec;
namespace enrich = sqlreward::enrich;

TEST(Rollout, Parse) {
  auto p = rw::parse_rollout("<think>steps</think>\nSELECT 1");
  EXPECT_TRUE(p.format_valid);
  EXPECT_EQ(*p.think, "steps");
  EXPECT_EQ(*p.sql, "SELECT 1");
  EXPECT_FALSE(rw::parse_rollout("SELECT 1").format_valid);
  EXPECT_FALSE(rw::parse_rollout("<think>steps\nSELECT 1").format_valid);
  EXPECT_FALSE(rw::parse_rollout("").format_valid);
  EXPECT_FALSE(rw::parse_rollout("<think>a</think>").format_valid);
  EXPECT_FALSE(rw::parse_rollout("<think>a</think><think>b</think>SELECT 1").format_valid);
  EXPECT_FALSE(rw::parse_rollout("preamble <think>a</think>SELECT 1").format_valid);
  auto prose = rw::parse_rollout("<think>a</think>answer is 42, not SQL");
  EXPECT_TRUE(prose.format_valid);
  EXPECT_EQ(*prose.sql, "answer is 42, not SQL");
  auto fenced = rw::parse_rollout("<think>a</think>\n```sql\nSELECT 2\n```\n  ");
  EXPECT_TRUE(fenced.format_valid);
  EXPECT_EQ(*fenced.sql, "SELECT 2");
  EXPECT_FALSE(rw::parse_rollout("SELECT 1").think.has_value());
}

TEST(Components, FormatAndExecution) {
  EXPECT_EQ(rw::format_reward(rw::parse_rollout("<think>x</think>SELECT 1")), 1);
  EXPECT_EQ(rw::format_reward(rw::parse_rollout("<think>x SELECT 1")), 0);
  EXPECT_EQ(rw::format_reward(rw::parse_rollout("")), 0);
  EXPECT_EQ(rw::execution_reward(exec::Outcome::Failed), 0);
  EXPECT_EQ(rw::execution_reward(exec::Outcome::ExecutedMismatch), 1);
  EXPECT_EQ(rw::execution_reward(exec::Outcome::Match), 2);
}

TEST(Shaping, ValuesAndDomain) {
  EXPECT_EQ(rw::shape(0.0, rw::kPresetS3), 0.0);
  EXPECT_NEAR(rw::shape(1.0, rw::kPresetS3), 0.8005, 1e-12);
  EXPECT_NEAR(rw::shape(1.0, rw::kPresetS4), 0.8, 1e-12);
  EXPECT_NEAR(rw::shape(0.95, rw::kPresetS3), 0.79034, 1e-5);
  EXPECT_LT(rw::shape(0.95, rw::kPresetS3), 0.95);
  EXPECT_THROW(rw::shape(-0.01, rw::kPresetS3), sqlreward::DomainError);
  EXPECT_THROW(rw::shape(1.01, rw::kPresetS3), sqlreward::DomainError);
  EXPECT_THROW(rw::shape(std::nan(""), rw::kPresetS3), sqlreward::DomainError);
  EXPECT_THROW(rw::validate({1.5, 1, 1}), sqlreward::DomainError);
  EXPECT_THROW(rw::validate({0.5, 0, 1}), sqlreward::DomainError);
  EXPECT_NO_THROW(rw::validate(rw::kPresetS1));
  EXPECT_EQ(rw::preset("S2").gamma, 0.55);
  EXPECT_THROW(rw::preset("S9"), sqlreward::DataError);
}

TEST(Shaping, MonotoneForAllPresets) {
  for (const auto& np : rw::kPresets) {
    double prev = rw::shape(0.0, np.params);
    EXPECT_EQ(prev, 0.0);
    for (int i = 1; i <= 1000; ++i) {
      const double v = rw::shape(i / 1000.0, np.params);
      EXPECT_GE(v, prev) << np.name << " at " << i;
      prev = v;
    }
  }
}

TEST(Atomic, Examples) {
  enrich::ReferencePool pool;
  pool.gold = "SELECT name FROM cust WHERE ct = 'AU'";
  EXPECT_NEAR(rw::atomic_reward(pool.gold, pool, rw::kPresetS3), 0.8005, 1e-12);
  EXPECT_EQ(rw::atomic_reward("SELEC nonsense", pool, rw::kPresetS3), 0.0);
  const std::string pred = "SELECT name FROM cust WHERE ct = 'US' ORDER BY name";
  const double gold_only = rw::atomic_reward(pred, pool, rw::kPresetS3);
  pool.variants.push_back("SELECT name FROM cust WHERE ct = 'AU' ORDER BY name");
  const double enriched = rw::atomic_reward(pred, pool, rw::kPresetS3);
  EXPECT_GT(enriched, gold_only);
  EXPECT_DOUBLE_EQ(rw::max_jaccard(pred, pool.references()), 0.6);
}

class CompositeTest : public ::testing::Test {
 protected:
  sqlreward::testing::TempDir dir;
  std::filesystem::path db = sqlreward::testing::make_toy_db(dir / "toy.db");
  std::shared_ptr<mem::StaticProvider> provider = std::make_shared<mem::StaticProvider>(4);
  std::unique_ptr<mem::MemoryBank> bank;
  enrich::ReferencePool pool;

  void SetUp() override {
    provider->add("trace for a near miss", {1, 0, 0, 0});
    bank = std::make_unique<mem::MemoryBank>(provider, 4);
    bank->add({"other-1", "other_db", "seed", {1, 1, 1, 1}, "", mem::Source::Seed});
    pool.gold = "SELECT id * 0.5 FROM cust";
    pool.variants = {"SELECT id / 2.0 FROM cust"};
  }

  rw::ScoringContext ctx() {
    rw::ScoringContext c;
    c.gold_sql = pool.gold;
    c.db = db;
    c.pool = &pool;
    c.bank = bank.get();
    c.db_id = "toy";
    c.config.memory_insert = false;
    return c;
  }
};

TEST_F(CompositeTest, Ladder) {
  auto c = ctx();
  auto wrong_format = rw::composite_reward("SELECT id / 2.0 FROM cust", c);
  EXPECT_EQ(wrong_format.breakdown.total, 0.0);

  auto near_miss = rw::composite_reward("<think>trace for a near miss</think>SELECT id / 2 FROM cust", c);
  EXPECT_EQ(near_miss.breakdown.outcome, exec::Outcome::ExecutedMismatch);
  EXPECT_DOUBLE_EQ(near_miss.jaccard_max, 1.0);
  EXPECT_NEAR(near_miss.breakdown.memory, 0.5, 1e-12);
  EXPECT_NEAR(near_miss.breakdown.total, 3.3005, 1e-12);

  auto correct = rw::composite_reward("<think>trace for a near miss</think>SELECT id/2.0 FROM cust", c);
  EXPECT_EQ(correct.breakdown.outcome, exec::Outcome::Match);
  EXPECT_EQ(correct.breakdown.atomic, 0.0);
  EXPECT_EQ(correct.breakdown.memory, 1.0);
  EXPECT_EQ(correct.breakdown.total, 4.0);

  auto broken = rw::composite_reward("<think>trace for a near miss</think>SELECT id / 2 FROM cust WHERE nope = 1", c);
  EXPECT_EQ(broken.breakdown.outcome, exec::Outcome::Failed);
  EXPECT_EQ(broken.breakdown.exec, 0.0);
  EXPECT_GT(broken.breakdown.atomic, 0.0);
  EXPECT_DOUBLE_EQ(broken.breakdown.total, 1.0 + broken.breakdown.atomic + broken.breakdown.memory);
}

TEST_F(CompositeTest, MemoryRewardCases) {
  auto invalid = rw::parse_rollout("no think");
  EXPECT_EQ(rw::memory_reward(invalid, exec::Outcome::Match, bank.get(), "toy", 20, mem::Scope::CrossDB), 0.0);
  auto valid = rw::parse_rollout("<think>trace for a near miss</think>SELECT 1");
  EXPECT_EQ(rw::memory_reward(valid, exec::Outcome::Match, bank.get(), "toy", 20, mem::Scope::CrossDB), 1.0);
  // the only entry is from other_db, so SameOnly retrieves nothing
  auto d = rw::memory_reward_detail(valid, exec::Outcome::ExecutedMismatch, bank.get(), "toy", 20, mem::Scope::SameOnly);
  EXPECT_TRUE(d.empty_retrieval);
  EXPECT_EQ(d.value, 0.0);

  auto stub = std::make_shared<mem::StubProvider>(32);
  mem::MemoryBank sb(stub, 32);
  sb.add({"", "other", "same words here", stub->embed("same words here"), "", mem::Source::Seed});
  auto p = rw::parse_rollout("<think>same words here</think>SELECT 1");
  EXPECT_NEAR(rw::memory_reward(p, exec::Outcome::ExecutedMismatch, &sb, "toy", 1, mem::Scope::CrossDB), 1.0, 1e-12);

  provider->add("opposite", {-1, -1, -1, -1});
  auto neg = rw::parse_rollout("<think>opposite</think>SELECT 1");
  auto nd = rw::memory_reward_detail(neg, exec::Outcome::Failed, bank.get(), "toy", 20, mem::Scope::CrossDB);
  EXPECT_LT(nd.cosine, 0.0);
  EXPECT_EQ(nd.value, 0.0);
}

TEST_F(CompositeTest, GoldFailurePropagates) {
  auto c = ctx();
  c.gold_sql = "SELECT * FROM nowhere";
  EXPECT_THROW(rw::composite_reward("<think>x</think>SELECT 1", c), sqlreward::GoldExecutionFailed);
}

TEST_F(CompositeTest, InsertOnSuccess) {
  auto stub = std::make_shared<mem::StubProvider>(64);
  mem::MemoryBank sb(stub, 64);
  auto c = ctx();
  c.bank = &sb;
  c.config.memory_insert = true;
  std::string trace = sqlreward::testing::synthetic_trace(60, 6, {"cust.id", "cust.name"});
  auto first = rw::composite_reward("<think>" + trace + "</think>SELECT id / 2.0 FROM cust", c);
  EXPECT_EQ(first.memory_action, rw::MemoryAction::Inserted);
  EXPECT_EQ(sb.size(), 1u);
  auto again = rw::composite_reward("<think>" + trace + "</think>SELECT id / 2.0 FROM cust", c);
  EXPECT_EQ(again.memory_action, rw::MemoryAction::Duplicate);
  auto gated = rw::composite_reward("<think>short</think>SELECT id / 2.0 FROM cust", c);
  EXPECT_EQ(gated.memory_action, rw::MemoryAction::GateRejected);
  EXPECT_EQ(gated.gate_reason, mem::GateReason::TooShort);
  auto wrong = rw::composite_reward("<think>" + trace + " x</think>SELECT id FROM cust", c);
  EXPECT_EQ(wrong.memory_action, rw::MemoryAction::Skipped);
  c.config.memory_insert = false;
  auto off = rw::composite_reward("<think>" + sqlreward::testing::synthetic_trace(60, 6, {"cust.id", "cust.name"}, "z") +
                                      "</think>SELECT id / 2.0 FROM cust",
                                  c);
  EXPECT_EQ(off.memory_action, rw::MemoryAction::Skipped);
  EXPECT_EQ(sb.size(), 1u);
}

TEST_F(CompositeTest, RandomRolloutsRespectBoundsAndEqualComponentSum) {
  auto stub = std::make_shared<mem::StubProvider>(32);
  mem::MemoryBank sb(stub, 32);
  for (int i = 0; i < 6; ++i)
    sb.add({"", i % 2 ? "toy" : "other", "t", stub->embed("seed trace " + std::to_string(i)), "", mem::Source::Seed});
  auto c = ctx();
  c.bank = &sb;
  const std::vector<std::string> sqls{"SELECT id / 2.0 FROM cust", "SELECT id FROM cust", "SELECT name FROM cust",
                                      "SELEC x", "SELECT id * 0.5 FROM cust WHERE 1", "SELECT * FROM orders",
                                      "", "SELECT id / 2 FROM cust", "SELECT COUNT(*) FROM cust"};
  const std::vector<std::string> shells{"<think>{T}</think>{S}", "{S}", "<think>{T}</think>", "<think>{T}{S}",
                                        "<think>{T}</think>\n{S}\n", "x<think>{T}</think>{S}"};
  std::mt19937 rng(3);
  for (int i = 0; i < 120; ++i) {
    std::string text = shells[rng() % shells.size()];
    const std::string sqltext = sqls[rng() % sqls.size()];
    const std::string trace = "seed trace " + std::to_string(rng() % 9) + " words";
    if (auto pos = text.find("{T}"); pos != std::string::npos) text.replace(pos, 3, trace);
    if (auto pos = text.find("{S}"); pos != std::string::npos) text.replace(pos, 3, sqltext);

    const auto r = rw::composite_reward(text, c);
    const auto& b = r.breakdown;
    EXPECT_GE(b.total, 0.0);
    EXPECT_LE(b.total, 4.0);
    EXPECT_TRUE(b.format == 0.0 || b.format == 1.0);
    EXPECT_GE(b.atomic, 0.0);
    EXPECT_LE(b.atomic, rw::shape(1.0, c.config.shaping));
    EXPECT_GE(b.memory, 0.0);
    EXPECT_LE(b.memory, 1.0);
    if (b.outcome == exec::Outcome::Match) {
      EXPECT_EQ(b.atomic, 0.0);
      EXPECT_EQ(b.memory, 1.0);
    }
    if (b.format == 0.0) EXPECT_EQ(b.total, 0.0);

    // independent recomputation
    const auto p = rw::parse_rollout(text);
    double expect = 0.0;
    if (p.format_valid) {
      const auto gold = exec::execute_sql(db, c.gold_sql, c.config.timeout_ms);
      const auto pred = exec::execute_sql(db, *p.sql, c.config.timeout_ms);
      const auto outcome = exec::classify_outcome(pred, gold);
      const double atomic = outcome == exec::Outcome::Match ? 0.0 : rw::atomic_reward(*p.sql, pool, c.config.shaping);
      expect = rw::format_reward(p) + rw::execution_reward(outcome) + atomic +
               rw::memory_reward(p, outcome, &sb, c.db_id, c.config.k, c.config.scope);
      EXPECT_EQ(outcome, b.outcome);
    }
    EXPECT_EQ(b.total, expect) << text;
    const auto again = rw::composite_reward(text, c);
    EXPECT_EQ(again.breakdown.total, b.total);
  }
}
