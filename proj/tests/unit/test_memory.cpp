#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "sqlreward/errors.hpp"
#include "sqlreward/memory/bank.hpp"

namespace mem = sqlreward::memory;
using sqlreward::testing::bigram_trace;
using sqlreward::testing::synthetic_trace;

namespace {

const std::vector<std::string> kCols{"cust.name", "cust.ct", "orders.total"};

std::size_t count_tokens(const std::string& s) {
  std::istringstream in(s);
  std::string w;
  std::size_t n = 0;
  while (in >> w) ++n;
  return n;
}

}  // namespace

TEST(Stub, DeterministicAndNormalized) {
  mem::StubProvider stub(64);
  auto a = stub.embed("a b a b");
  auto b = stub.embed("a b a b");
  EXPECT_EQ(a, b);
  EXPECT_NEAR(mem::norm(a), 1.0, 1e-12);
  EXPECT_NEAR(mem::cosine(a, b), 1.0, 1e-6);
  EXPECT_THROW(stub.embed(""), sqlreward::DomainError);
  EXPECT_THROW(stub.embed("   "), sqlreward::DomainError);
  EXPECT_EQ(stub.embed("A B a b"), stub.embed("a b A  B"));
  EXPECT_NE(stub.embed("a b"), stub.embed("b a"));
}

TEST(Cosine, Basics) {
  EXPECT_DOUBLE_EQ(mem::cosine({1, 2}, {1, 2}), 1.0);
  EXPECT_DOUBLE_EQ(mem::cosine({1, 2}, {-1, -2}), -1.0);
  EXPECT_DOUBLE_EQ(mem::cosine({1, 0}, {0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(mem::cosine({0, 0}, {0, 1}), 0.0);
  EXPECT_THROW(mem::cosine({1, 0}, {1, 0, 0}), sqlreward::DimensionMismatch);
}

TEST(Centroid, Arithmetic) {
  auto entry = [](mem::Vector v) {
    mem::MemoryEntry e;
    e.embedding = std::move(v);
    return e;
  };
  EXPECT_EQ(mem::centroid({entry({1, 2, 3})}), (mem::Vector{1, 2, 3}));
  EXPECT_EQ(mem::centroid({entry({1, -2}), entry({-1, 2})}), (mem::Vector{0, 0}));
  auto c = mem::centroid({entry({1, 0, 2}), entry({0, 3, 1}), entry({2, 3, 0})});
  EXPECT_NEAR(c[0], 1.0, 1e-12);
  EXPECT_NEAR(c[1], 2.0, 1e-12);
  EXPECT_NEAR(c[2], 1.0, 1e-12);
  EXPECT_THROW(mem::centroid({}), sqlreward::EmptyRetrieval);
}

TEST(Gate, SyntheticFixturesHaveIntendedShape) {
  EXPECT_EQ(count_tokens(synthetic_trace(100, 8, kCols)), 100u);
  EXPECT_EQ(count_tokens(bigram_trace(600, kCols)), 1001u);
  auto m = mem::gate_metrics(bigram_trace(600, kCols), kCols);
  EXPECT_EQ(m.token_count, 1001u);
  EXPECT_DOUBLE_EQ(m.bigram_uniqueness, 0.6);
}

TEST(Gate, HundredTokenTraceWithThreeColumns) {
  auto r = mem::quality_gate(synthetic_trace(100, 8, kCols), kCols);
  EXPECT_TRUE(r.accepted);
  EXPECT_EQ(r.reason, mem::GateReason::Ok);
  EXPECT_DOUBLE_EQ(r.metrics.schema_density, 0.08);
  EXPECT_EQ(r.metrics.distinct_columns, 3u);
  EXPECT_DOUBLE_EQ(r.metrics.bigram_uniqueness, 1.0);
}

TEST(Gate, ShortAndRepetitive) {
  EXPECT_EQ(mem::quality_gate(synthetic_trace(10, 3, kCols), kCols).reason, mem::GateReason::TooShort);
  std::string same;
  for (int i = 0; i < 47; ++i) same += "word ";
  same += "name ct total";
  auto rr = mem::quality_gate(same, kCols);
  EXPECT_EQ(rr.reason, mem::GateReason::LowDiversity);
  EXPECT_NEAR(rr.metrics.bigram_uniqueness, 4.0 / 49.0, 1e-12);
}

TEST(Gate, Boundaries) {
  EXPECT_EQ(mem::quality_gate(synthetic_trace(29, 3, kCols), kCols).reason, mem::GateReason::TooShort);
  EXPECT_EQ(mem::quality_gate(synthetic_trace(30, 3, kCols), kCols).reason, mem::GateReason::Ok);
  EXPECT_EQ(mem::quality_gate(synthetic_trace(2000, 200, kCols), kCols).reason, mem::GateReason::Ok);
  EXPECT_EQ(mem::quality_gate(synthetic_trace(2001, 200, kCols), kCols).reason, mem::GateReason::TooLong);
  EXPECT_EQ(mem::quality_gate(synthetic_trace(1000, 49, kCols), kCols).reason, mem::GateReason::LowDensity);
  EXPECT_EQ(mem::quality_gate(synthetic_trace(1000, 50, kCols), kCols).reason, mem::GateReason::Ok);
  EXPECT_EQ(mem::quality_gate(synthetic_trace(100, 8, {"cust.name"}), kCols).reason, mem::GateReason::FewColumns);
  EXPECT_EQ(mem::quality_gate(synthetic_trace(100, 8, {"cust.name", "ct"}), kCols).reason, mem::GateReason::Ok);
  EXPECT_EQ(mem::quality_gate(bigram_trace(599, kCols), kCols).reason, mem::GateReason::LowDiversity);
  EXPECT_EQ(mem::quality_gate(bigram_trace(600, kCols), kCols).reason, mem::GateReason::Ok);
}

TEST(Gate, MentionMatching) {
  auto m = mem::gate_metrics("T1.name, (ct) `total`. NAME orders.total cust.ctx", kCols);
  EXPECT_EQ(m.token_count, 6u);
  EXPECT_EQ(m.distinct_columns, 3u);
  EXPECT_DOUBLE_EQ(m.schema_density, 5.0 / 6.0);
}

TEST(ExtractThink, Blocks) {
  EXPECT_EQ(mem::extract_think("<think> steps </think>\nSELECT 1"), "steps");
  EXPECT_EQ(mem::extract_think("  plain text "), "plain text");
}

class BankTest : public ::testing::Test {
 protected:
  std::shared_ptr<mem::StaticProvider> provider = std::make_shared<mem::StaticProvider>(4);
  std::string t_base = synthetic_trace(100, 8, kCols, "a");
  std::string t_at = synthetic_trace(100, 8, kCols, "b");
  std::string t_below = synthetic_trace(100, 8, kCols, "c");
  std::string t_far = synthetic_trace(100, 8, kCols, "d");

  void SetUp() override {
    provider->add(t_base, {1, 0, 0, 0});
    provider->add(t_at, {9, 3, 3, 1});  // cosine with base = 9/10
    provider->add(t_below, {0.899, std::sqrt(1 - 0.899 * 0.899), 0, 0});
    provider->add(t_far, {0.85, 0, std::sqrt(1 - 0.85 * 0.85), 0});
  }
};

TEST_F(BankTest, DedupBoundary) {
  mem::MemoryBank bank(provider, 4);
  EXPECT_EQ(bank.insert(t_base, "A", kCols).kind, mem::InsertOutcome::Kind::Inserted);
  auto at = bank.insert(t_at, "B", kCols);
  EXPECT_EQ(at.kind, mem::InsertOutcome::Kind::Duplicate);
  EXPECT_DOUBLE_EQ(at.similarity, 0.9);
  auto below = bank.insert(t_below, "B", kCols);
  EXPECT_EQ(below.kind, mem::InsertOutcome::Kind::Inserted);
  EXPECT_NEAR(below.similarity, 0.899, 1e-12);
  EXPECT_EQ(bank.size(), 2u);
}

TEST_F(BankTest, ReinsertIsDuplicateAndGateRejectsLeaveBankUnchanged) {
  mem::MemoryBank bank(provider, 4);
  bank.insert(t_base, "A", kCols);
  auto again = bank.insert(t_base, "A", kCols);
  EXPECT_EQ(again.kind, mem::InsertOutcome::Kind::Duplicate);
  EXPECT_DOUBLE_EQ(again.similarity, 1.0);
  auto gated = bank.insert("too short trace", "A", kCols);
  EXPECT_EQ(gated.kind, mem::InsertOutcome::Kind::GateRejected);
  EXPECT_EQ(gated.gate.reason, mem::GateReason::TooShort);
  EXPECT_EQ(bank.size(), 1u);
  EXPECT_EQ(bank.insert(t_far, "A", kCols).kind, mem::InsertOutcome::Kind::Inserted);
}

TEST(BankInit, FiltersSeedsWithoutDedup) {
  auto stub = std::make_shared<mem::StubProvider>(32);
  auto bank = mem::MemoryBank::init({{"<think>x y</think>SELECT 1", "A", true},
                                     {"<think>x y</think>SELECT 2", "A", true},
                                     {"<think>z</think>SELECT 3", "B", false}},
                                    stub, 32);
  EXPECT_EQ(bank->size(), 2u);
  EXPECT_EQ(bank->entries()[0].trace, "x y");
  EXPECT_EQ(bank->entries()[0].source, mem::Source::Seed);
  auto empty = mem::MemoryBank::init({}, stub, 32);
  EXPECT_EQ(empty->size(), 0u);
  EXPECT_TRUE(empty->retrieve(stub->embed("q"), "A", 20, mem::Scope::Mixed).empty());
  auto two_of_three = mem::MemoryBank::init({{"a", "A", true}, {"b", "A", false}, {"c", "B", true}}, stub, 32);
  EXPECT_EQ(two_of_three->size(), 2u);
}

TEST(BankRetrieve, Scopes) {
  auto stub = std::make_shared<mem::StubProvider>(32);
  mem::MemoryBank bank(stub, 32);
  for (int i = 0; i < 5; ++i) bank.add({"", "A", "trace number " + std::to_string(i), stub->embed("t" + std::to_string(i) + " x"), "", mem::Source::Seed});
  auto q = stub->embed("t3 x");
  EXPECT_TRUE(bank.retrieve(q, "A", 20, mem::Scope::CrossDB).empty());
  auto top = bank.retrieve(q, "A", 3, mem::Scope::SameOnly);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(top[0].trace, "trace number 3");
  EXPECT_EQ(bank.retrieve(q, "B", 20, mem::Scope::CrossDB).size(), 5u);
  EXPECT_THROW(bank.retrieve(q, "A", 0, mem::Scope::Mixed), sqlreward::DomainError);
}

TEST(BankRetrieve, TiesGoToOlderEntries) {
  auto p = std::make_shared<mem::StaticProvider>(2);
  mem::MemoryBank bank(p, 2);
  bank.add({"e1", "A", "t", {1, 0}, "", mem::Source::Seed});
  bank.add({"e2", "A", "t", {2, 0}, "", mem::Source::Seed});
  bank.add({"e3", "A", "t", {0, 1}, "", mem::Source::Seed});
  auto r = bank.retrieve({1, 0}, "B", 2, mem::Scope::Mixed);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].id, "e1");
  EXPECT_EQ(r[1].id, "e2");
}

TEST(BankRetrieve, MatchesBruteForceAndCrossDbIsSound) {
  std::mt19937 rng(11);
  std::normal_distribution<double> g(0, 1);
  std::uniform_int_distribution<int> db(0, 3);
  auto p = std::make_shared<mem::StaticProvider>(8);
  for (int trial = 0; trial < 60; ++trial) {
    mem::MemoryBank bank(p, 8);
    const int n = trial == 0 ? 1000 : 1 + static_cast<int>(rng() % 200);
    for (int i = 0; i < n; ++i) {
      mem::Vector v(8);
      for (auto& x : v) x = g(rng);
      bank.add({"", "db" + std::to_string(db(rng)), "t", v, "", mem::Source::Seed});
    }
    mem::Vector q(8);
    for (auto& x : q) x = g(rng);
    const std::string qdb = "db" + std::to_string(db(rng));
    for (auto scope : {mem::Scope::CrossDB, mem::Scope::SameOnly, mem::Scope::Mixed}) {
      auto got = bank.retrieve(q, qdb, 20, scope);
      std::vector<std::pair<double, std::size_t>> oracle;
      auto all = bank.entries();
      for (std::size_t i = 0; i < all.size(); ++i) {
        const bool same = all[i].db_id == qdb;
        if ((scope == mem::Scope::CrossDB && same) || (scope == mem::Scope::SameOnly && !same)) continue;
        double d = 0, na = 0, nb = 0;
        for (int j = 0; j < 8; ++j) {
          d += q[j] * all[i].embedding[j];
          na += q[j] * q[j];
          nb += all[i].embedding[j] * all[i].embedding[j];
        }
        oracle.emplace_back(-d / std::sqrt(na * nb), i);
      }
      std::sort(oracle.begin(), oracle.end());
      ASSERT_EQ(got.size(), std::min<std::size_t>(20, oracle.size()));
      for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].id, all[oracle[i].second].id);
        if (scope == mem::Scope::CrossDB) EXPECT_NE(got[i].db_id, qdb);
      }
    }
  }
}

TEST(BankSnapshot, RoundTripReproducesRetrieval) {
  sqlreward::testing::TempDir dir;
  auto stub = std::make_shared<mem::StubProvider>(64);
  mem::MemoryBank bank(stub, 64);
  for (int i = 0; i < 30; ++i)
    bank.add({"", i % 2 ? "A" : "B", "trace " + std::to_string(i) + " about \"quotes\" and\nnewlines",
              stub->embed("trace " + std::to_string(i % 7) + " w" + std::to_string(i)), "", mem::Source::Student});
  bank.save(dir / "bank.jsonl");
  EXPECT_FALSE(std::filesystem::exists(dir / "bank.jsonl.tmp"));
  auto loaded = mem::MemoryBank::load(dir / "bank.jsonl", stub, 64);
  ASSERT_EQ(loaded->size(), bank.size());
  auto q = stub->embed("trace 3 w10");
  for (auto scope : {mem::Scope::CrossDB, mem::Scope::SameOnly, mem::Scope::Mixed}) {
    auto a = bank.retrieve(q, "A", 5, scope);
    auto b = loaded->retrieve(q, "A", 5, scope);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].id, b[i].id);
      EXPECT_EQ(a[i].embedding, b[i].embedding);
      EXPECT_EQ(a[i].trace, b[i].trace);
    }
  }
  auto missing = mem::MemoryBank::load(dir / "absent.jsonl", stub, 64);
  EXPECT_EQ(missing->size(), 0u);
}

TEST(BankSnapshot, DimensionMismatchOnLoad) {
  sqlreward::testing::TempDir dir;
  auto stub = std::make_shared<mem::StubProvider>(8);
  mem::MemoryBank bank(stub, 8);
  bank.add({"", "A", "t", stub->embed("x"), "", mem::Source::Seed});
  bank.save(dir / "b.jsonl");
  auto other = std::make_shared<mem::StubProvider>(16);
  EXPECT_THROW(mem::MemoryBank::load(dir / "b.jsonl", other, 16), sqlreward::DimensionMismatch);
}

TEST(StaticProviderFile, LoadsByTextAndId) {
  sqlreward::testing::TempDir dir;
  sqlreward::testing::write_text(dir / "e.jsonl",
                                 "{\"id\":\"r1\",\"text\":\"hello\",\"embedding\":[1,0]}\n"
                                 "{\"text\":\"world\",\"embedding\":[0,1]}\n");
  auto p = mem::StaticProvider::from_file(dir / "e.jsonl");
  EXPECT_EQ(p->dim(), 2u);
  EXPECT_EQ(p->embed("hello"), (mem::Vector{1, 0}));
  EXPECT_EQ(p->embed("r1"), (mem::Vector{1, 0}));
  EXPECT_THROW(p->embed("unknown"), sqlreward::ProviderUnavailable);
}

TEST(HttpProviderTest, UnreachableEndpoint) {
  mem::HttpProvider p("http://127.0.0.1:9/embed", 4, "", 300);
  EXPECT_THROW(p.embed("hello"), sqlreward::ProviderUnavailable);
}
