#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "fixtures.hpp"
#include "sqlreward/errors.hpp"
#include "sqlreward/service/transport.hpp"

namespace svc = sqlreward::service;
namespace mem = sqlreward::memory;
using json = nlohmann::json;
using sqlreward::testing::TempDir;

TEST(ServiceConfig, DefaultsFileAndOverridesMatrix) {
  TempDir dir;
  const json file_values = {{"preset", "S1"}, {"k", 7}, {"scope", "Mixed"}, {"memory_insert", false},
                            {"timeouts", {{"reward_ms", 1234}}}};
  const json request_values = {{"preset", "S4"}, {"k", 3}, {"scope", "SameOnly"}, {"memory_insert", true},
                               {"timeout", 99}};
  for (const char* field : {"preset", "k", "scope", "memory_insert", "timeout"}) {
    for (int level = 0; level < 3; ++level) {
      json file = json::object();
      json req = json::object();
      const std::string f = field;
      if (level >= 1) {
        if (f == "timeout")
          file["timeouts"] = file_values["timeouts"];
        else
          file[f] = file_values[f];
      }
      if (level == 2) req[f] = request_values[f];
      sqlreward::testing::write_text(dir / "c.json", file.dump());
      const auto cfg = svc::resolve_reward_config(svc::load_config(dir / "c.json"), svc::overrides_from_json(req));
      SCOPED_TRACE(f + " level " + std::to_string(level));
      if (f == "preset") {
        const double expect[] = {sqlreward::reward::kPresetS3.gamma, sqlreward::reward::kPresetS1.gamma,
                                 sqlreward::reward::kPresetS4.gamma};
        EXPECT_EQ(cfg.shaping.gamma, expect[level]);
      } else if (f == "k") {
        const std::size_t expect[] = {20, 7, 3};
        EXPECT_EQ(cfg.k, expect[level]);
      } else if (f == "scope") {
        const mem::Scope expect[] = {mem::Scope::CrossDB, mem::Scope::Mixed, mem::Scope::SameOnly};
        EXPECT_EQ(cfg.scope, expect[level]);
      } else if (f == "memory_insert") {
        const bool expect[] = {true, false, true};
        EXPECT_EQ(cfg.memory_insert, expect[level]);
      } else {
        const int expect[] = {5000, 1234, 99};
        EXPECT_EQ(cfg.timeout_ms, expect[level]);
      }
    }
  }
}

TEST(ServiceConfig, RejectsBadValuesAndEnvOverridesPaths) {
  EXPECT_THROW(svc::merge_config({}, json{{"bogus", 1}}), sqlreward::DataError);
  EXPECT_THROW(svc::merge_config({}, json{{"k", 0}}), sqlreward::DataError);
  EXPECT_THROW(svc::merge_config({}, json{{"preset", "S7"}}), sqlreward::DataError);
  EXPECT_THROW(svc::overrides_from_json(json{{"timeout", -5}}), sqlreward::DataError);
  EXPECT_THROW(svc::overrides_from_json(json{{"scope", "Everywhere"}}), sqlreward::DataError);
  auto c = svc::merge_config({}, json{{"db_root", "/from/file"}, {"bank", "/file/bank.jsonl"}});
  ::setenv("SQLREWARD_DB_ROOT", "/from/env", 1);
  svc::apply_env(c);
  ::unsetenv("SQLREWARD_DB_ROOT");
  EXPECT_EQ(c.db_root, "/from/env");
  EXPECT_EQ(c.bank, "/file/bank.jsonl");
  auto round = svc::merge_config({}, svc::to_json(c));
  EXPECT_EQ(svc::to_json(round), svc::to_json(c));
}

class ServiceTest : public ::testing::Test {
 protected:
  TempDir dir;
  std::shared_ptr<mem::EmbeddingProvider> provider = std::make_shared<mem::StubProvider>(64);
  const std::string gold = "SELECT name FROM cust WHERE ct = 'AU'";

  void SetUp() override {
    std::filesystem::create_directories(dir / "dbs" / "toy");
    sqlreward::testing::make_toy_db(dir / "dbs" / "toy" / "toy.sqlite");
  }

  svc::ServiceConfig config() const {
    svc::ServiceConfig c;
    c.db_root = dir / "dbs";
    c.bank = dir / "bank.jsonl";
    c.embedding.dim = 64;
    return c;
  }

  std::string good_rollout(std::string_view salt = "w") const {
    return "<think>" + sqlreward::testing::synthetic_trace(40, 6, {"name", "ct"}, salt) + "</think>\n" + gold;
  }

  json request(int id, std::string rollout) const {
    return {{"id", id}, {"question_id", "q1"}, {"db_id", "toy"}, {"rollout", std::move(rollout)}, {"gold_sql", gold}};
  }
};

TEST_F(ServiceTest, BatchOf32PreservesOrderAndIsolatesFailures) {
  svc::RewardService service(config(), provider);
  std::vector<json> batch;
  for (int i = 0; i < 32; ++i) batch.push_back(request(i, "<think>t</think> SELECT name FROM cust"));
  batch[5]["db_id"] = "missing_db";
  batch[9] = json::array();  // not an object
  batch[13]["rollout"] = "<think>t</think> SELECT " + std::string(20000, '(') + "1";
  batch[17]["rollout"] = "<think>t</think> WITH RECURSIVE c(x) AS (SELECT 1 UNION ALL SELECT x + 1 FROM c) "
                         "SELECT COUNT(*) FROM c";
  batch[17]["config_overrides"] = {{"timeout", 200}};
  batch[21]["pool_ref"] = "no-such-pool";
  batch[25]["gold_sql"] = "SELECT * FROM nowhere";
  const auto out = service.score_batch(batch);
  ASSERT_EQ(out.size(), 32u);
  for (int i = 0; i < 32; ++i) {
    if (i == 9) {
      EXPECT_TRUE(out[i]["id"].is_null());
      continue;
    }
    EXPECT_EQ(out[i]["id"], i);
  }
  EXPECT_EQ(out[5]["error"]["code"], "DbNotFound");
  EXPECT_EQ(out[9]["error"]["code"], "DataError");
  EXPECT_EQ(out[13]["outcome"], "Failed");
  EXPECT_EQ(out[17]["outcome"], "Failed");
  EXPECT_LT(out[17]["elapsed_ms"].get<double>(), 2000.0);
  EXPECT_EQ(out[21]["error"]["code"], "PoolMissing");
  EXPECT_EQ(out[25]["error"]["code"], "GoldExecutionFailed");
  EXPECT_EQ(out[0]["outcome"], "ExecutedMismatch");
  EXPECT_EQ(out[0]["breakdown"]["exec"], 1.0);
  EXPECT_EQ(out[0]["memory_action"], "Skipped");
}

TEST_F(ServiceTest, MalformedRolloutScoresZero) {
  svc::RewardService service(config(), provider);
  const auto out = service.score_batch({request(1, "no think block here SELECT 1")});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0]["breakdown"]["total"], 0.0);
  EXPECT_EQ(out[0]["breakdown"]["format"], 0.0);
}

TEST_F(ServiceTest, MatchInsertsThenDuplicates) {
  svc::RewardService service(config(), provider);
  auto first = service.score_json(request(1, good_rollout()));
  EXPECT_EQ(first["breakdown"]["total"], 4.0);
  EXPECT_EQ(first["memory_action"], "Inserted");
  auto again = service.score_json(request(2, good_rollout()));
  EXPECT_EQ(again["memory_action"], "Duplicate");
  auto no_insert = request(3, good_rollout("z"));
  no_insert["config_overrides"] = {{"memory_insert", false}};
  EXPECT_EQ(service.score_json(no_insert)["memory_action"], "Skipped");
  auto short_trace = service.score_json(request(4, "<think>too short</think>" + gold));
  EXPECT_EQ(short_trace["memory_action"], "GateRejected");
  EXPECT_EQ(short_trace["gate_reason"], "TooShort");
  EXPECT_EQ(service.health(), (json{{"status", "ok"}, {"bank_size", 1}}));
}

TEST_F(ServiceTest, PoolsByKeyInlineAndImplicit) {
  sqlreward::testing::write_text(
      dir / "pools.jsonl",
      json{{"question_id", "q1"}, {"db_id", "toy"}, {"gold", gold}, {"variants", {"SELECT name FROM cust WHERE ct IN ('AU')"}}}
              .dump() +
          "\n");
  auto c = config();
  c.pools = dir / "pools.jsonl";
  svc::RewardService service(c, provider);
  EXPECT_EQ(service.pool_count(), 1u);
  const std::string pred = "<think>t</think> SELECT name FROM cust WHERE ct IN ('AU') LIMIT 1";
  auto bare = request(1, pred);
  bare["pool_ref"] = json::array();
  auto implicit = request(2, pred);
  auto keyed = request(3, pred);
  keyed["pool_ref"] = "q1";
  keyed.erase("gold_sql");
  auto inline_pool = request(4, pred);
  inline_pool["pool_ref"] = {{"variants", {"SELECT name FROM cust WHERE ct IN ('AU')"}}};
  const auto out = service.score_batch({bare, implicit, keyed, inline_pool});
  const double base = out[0]["breakdown"]["atomic"];
  EXPECT_GT(out[1]["breakdown"]["atomic"].get<double>(), base);
  EXPECT_EQ(out[1]["breakdown"], out[2]["breakdown"]);
  EXPECT_EQ(out[1]["breakdown"], out[3]["breakdown"]);
}

TEST_F(ServiceTest, StdioOneLineInOneLineOut) {
  svc::RewardService service(config(), provider);
  std::istringstream in(request(7, good_rollout()).dump() + "\n\n{not json\n" +
                        json::array({request(8, "x"), request(9, "y")}).dump() + "\n");
  std::ostringstream out;
  EXPECT_EQ(svc::serve_stdio(service, in, out), 3u);
  std::istringstream lines(out.str());
  std::string l1, l2, l3, extra;
  std::getline(lines, l1);
  std::getline(lines, l2);
  std::getline(lines, l3);
  EXPECT_FALSE(std::getline(lines, extra));
  EXPECT_EQ(json::parse(l1)["id"], 7);
  EXPECT_TRUE(json::parse(l2)["id"].is_null());
  EXPECT_EQ(json::parse(l2)["error"]["code"], "MalformedJson");
  EXPECT_EQ(json::parse(l3).size(), 2u);
  // EOF flushed the snapshot holding the inserted trace
  auto reloaded = mem::MemoryBank::load(dir / "bank.jsonl", provider, 64);
  EXPECT_EQ(reloaded->size(), 1u);
}

TEST_F(ServiceTest, HttpEndpointsAndSnapshotAcrossRestart) {
  {
    svc::RewardService service(config(), provider);
    svc::HttpServer server(service);
    const int port = server.bind("127.0.0.1", 0);
    std::thread runner([&] { server.run(); });
    httplib::Client client("127.0.0.1", port);
    for (int i = 0; i < 200 && !server.running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));

    auto health = client.Get("/healthz");
    ASSERT_TRUE(health);
    EXPECT_EQ(json::parse(health->body), (json{{"status", "ok"}, {"bank_size", 0}}));

    auto scored = client.Post("/score", json::array({request(1, good_rollout()), request(2, "bad")}).dump(),
                              "application/json");
    ASSERT_TRUE(scored);
    const auto body = json::parse(scored->body);
    ASSERT_EQ(body.size(), 2u);
    EXPECT_EQ(body[0]["id"], 1);
    EXPECT_EQ(body[0]["memory_action"], "Inserted");
    EXPECT_EQ(body[1]["breakdown"]["total"], 0.0);

    auto wrapped = client.Post("/score", json{{"requests", {request(3, "bad")}}}.dump(), "application/json");
    ASSERT_TRUE(wrapped);
    EXPECT_EQ(json::parse(wrapped->body)[0]["id"], 3);

    auto malformed = client.Post("/score", "{oops", "application/json");
    ASSERT_TRUE(malformed);
    EXPECT_EQ(malformed->status, 400);
    EXPECT_TRUE(json::parse(malformed->body)["id"].is_null());

    auto ins = client.Post(
        "/memory/insert",
        json{{"trace", sqlreward::testing::synthetic_trace(40, 6, {"name", "ct"}, "other")}, {"db_id", "toy"}}.dump(),
        "application/json");
    ASSERT_TRUE(ins);
    EXPECT_EQ(json::parse(ins->body)["result"], "Inserted");
    auto dup = client.Post(
        "/memory/insert",
        json{{"trace", sqlreward::testing::synthetic_trace(40, 6, {"name", "ct"}, "other")}, {"db_id", "toy"}}.dump(),
        "application/json");
    EXPECT_EQ(json::parse(dup->body)["result"], "Duplicate");

    auto stats = client.Get("/memory/stats");
    ASSERT_TRUE(stats);
    const auto s = json::parse(stats->body);
    EXPECT_EQ(s["bank_size"], 2);
    EXPECT_EQ(s["dims"], 64);
    EXPECT_EQ(s["scope_default"], "CrossDB");

    server.stop();
    runner.join();
  }
  svc::RewardService restarted(config(), provider);
  EXPECT_EQ(restarted.health()["bank_size"], 2);
}
