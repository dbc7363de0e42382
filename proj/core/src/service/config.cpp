#include "sqlreward/service/config.hpp"

#include <cstdlib>
#include <set>

#include "sqlreward/errors.hpp"
#include "sqlreward/io/records.hpp"

namespace sqlreward::service {

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw DataError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw DataError("unknown key '" + key + "' in " + where);
}

template <typename T>
T get_as(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw DataError("bad value for '" + std::string(key) + "' in " + where);
  }
}

int positive_ms(const json& j, const char* key, const std::string& where) {
  const auto v = get_as<std::int64_t>(j, key, where);
  if (v <= 0 || v > 24LL * 3600 * 1000) throw DataError("'" + std::string(key) + "' must be a positive millisecond count");
  return static_cast<int>(v);
}

std::size_t positive_k(const json& j, const char* key, const std::string& where) {
  const auto v = get_as<std::int64_t>(j, key, where);
  if (v <= 0) throw DataError("'" + std::string(key) + "' must be positive");
  return static_cast<std::size_t>(v);
}

}  // namespace

ServiceConfig merge_config(ServiceConfig c, const json& j) {
  const std::string where = "config";
  check_keys(j, {"db_root", "pools", "bank", "embedding", "preset", "k", "scope", "memory_insert", "timeouts",
                 "match_mode", "threads", "per_db_limit", "http"},
             where);
  if (j.contains("db_root")) c.db_root = get_as<std::string>(j, "db_root", where);
  if (j.contains("pools")) c.pools = get_as<std::string>(j, "pools", where);
  if (j.contains("bank")) c.bank = get_as<std::string>(j, "bank", where);
  if (j.contains("embedding")) {
    const auto& e = j["embedding"];
    const std::string ew = "config.embedding";
    check_keys(e, {"provider", "dim", "url", "file", "model", "timeout_ms"}, ew);
    if (e.contains("provider")) c.embedding.kind = get_as<std::string>(e, "provider", ew);
    if (e.contains("dim")) c.embedding.dim = positive_k(e, "dim", ew);
    if (e.contains("url")) c.embedding.url = get_as<std::string>(e, "url", ew);
    if (e.contains("file")) c.embedding.file = get_as<std::string>(e, "file", ew);
    if (e.contains("model")) c.embedding.model = get_as<std::string>(e, "model", ew);
    if (e.contains("timeout_ms")) c.embedding.timeout_ms = positive_ms(e, "timeout_ms", ew);
  }
  if (j.contains("preset")) {
    c.preset = get_as<std::string>(j, "preset", where);
    reward::preset(c.preset);
  }
  if (j.contains("k")) c.k = positive_k(j, "k", where);
  if (j.contains("scope")) c.scope = memory::scope_from_name(get_as<std::string>(j, "scope", where));
  if (j.contains("memory_insert")) c.memory_insert = get_as<bool>(j, "memory_insert", where);
  if (j.contains("timeouts")) {
    const auto& t = j["timeouts"];
    const std::string tw = "config.timeouts";
    check_keys(t, {"reward_ms", "eval_ms"}, tw);
    if (t.contains("reward_ms")) c.reward_timeout_ms = positive_ms(t, "reward_ms", tw);
    if (t.contains("eval_ms")) c.eval_timeout_ms = positive_ms(t, "eval_ms", tw);
  }
  if (j.contains("match_mode")) c.match_mode = exec::match_mode_from_name(get_as<std::string>(j, "match_mode", where));
  if (j.contains("threads")) c.threads = get_as<std::size_t>(j, "threads", where);
  if (j.contains("per_db_limit")) c.per_db_limit = get_as<std::size_t>(j, "per_db_limit", where);
  if (j.contains("http")) {
    const auto& h = j["http"];
    const std::string hw = "config.http";
    check_keys(h, {"host", "port"}, hw);
    if (h.contains("host")) c.host = get_as<std::string>(h, "host", hw);
    if (h.contains("port")) {
      const auto port = get_as<std::int64_t>(h, "port", hw);
      if (port < 0 || port > 65535) throw DataError("config.http.port out of range");
      c.port = static_cast<std::uint16_t>(port);
    }
  }
  return c;
}

void apply_env(ServiceConfig& c) {
  auto env = [](const char* name) -> const char* {
    const char* v = std::getenv(name);
    return (v != nullptr && *v != '\0') ? v : nullptr;
  };
  if (const char* v = env("SQLREWARD_DB_ROOT")) c.db_root = v;
  if (const char* v = env("SQLREWARD_POOLS")) c.pools = v;
  if (const char* v = env("SQLREWARD_BANK")) c.bank = v;
  if (const char* v = env("SQLREWARD_EMBED_URL")) {
    c.embedding.url = v;
    c.embedding.kind = "http";
  }
}

ServiceConfig load_config(const std::optional<std::filesystem::path>& file) {
  ServiceConfig c;
  if (file) c = merge_config(c, io::read_json(*file));
  apply_env(c);
  return c;
}

json to_json(const ServiceConfig& c) {
  return {{"db_root", c.db_root.string()},
          {"pools", c.pools.string()},
          {"bank", c.bank.string()},
          {"embedding",
           {{"provider", c.embedding.kind},
            {"dim", c.embedding.dim},
            {"url", c.embedding.url},
            {"file", c.embedding.file},
            {"model", c.embedding.model},
            {"timeout_ms", c.embedding.timeout_ms}}},
          {"preset", c.preset},
          {"k", c.k},
          {"scope", memory::scope_name(c.scope)},
          {"memory_insert", c.memory_insert},
          {"timeouts", {{"reward_ms", c.reward_timeout_ms}, {"eval_ms", c.eval_timeout_ms}}},
          {"match_mode", exec::match_mode_name(c.match_mode)},
          {"threads", c.threads},
          {"per_db_limit", c.per_db_limit},
          {"http", {{"host", c.host}, {"port", c.port}}}};
}

Overrides overrides_from_json(const json& j) {
  Overrides o;
  if (j.is_null()) return o;
  const std::string where = "config_overrides";
  check_keys(j, {"preset", "k", "scope", "memory_insert", "timeout"}, where);
  if (j.contains("preset")) {
    o.preset = get_as<std::string>(j, "preset", where);
    reward::preset(*o.preset);
  }
  if (j.contains("k")) o.k = positive_k(j, "k", where);
  if (j.contains("scope")) o.scope = memory::scope_from_name(get_as<std::string>(j, "scope", where));
  if (j.contains("memory_insert")) o.memory_insert = get_as<bool>(j, "memory_insert", where);
  if (j.contains("timeout")) o.timeout_ms = positive_ms(j, "timeout", where);
  return o;
}

reward::RewardConfig resolve_reward_config(const ServiceConfig& c, const Overrides& o) {
  reward::RewardConfig r;
  r.shaping = reward::preset(o.preset.value_or(c.preset));
  r.k = o.k.value_or(c.k);
  r.scope = o.scope.value_or(c.scope);
  r.memory_insert = o.memory_insert.value_or(c.memory_insert);
  r.timeout_ms = o.timeout_ms.value_or(c.reward_timeout_ms);
  r.match_mode = c.match_mode;
  return r;
}

}  // namespace sqlreward::service
