#include "sqlreward/exec/executor.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "sqlreward/errors.hpp"

namespace sqlreward::exec {

namespace fs = std::filesystem;

std::string_view status_name(Status status) {
  switch (status) {
    case Status::Ok: return "OK";
    case Status::SyntaxError: return "SyntaxError";
    case Status::RuntimeError: return "RuntimeError";
    case Status::Timeout: return "Timeout";
  }
  return "RuntimeError";
}

std::string_view outcome_name(Outcome outcome) {
  switch (outcome) {
    case Outcome::Failed: return "Failed";
    case Outcome::ExecutedMismatch: return "ExecutedMismatch";
    case Outcome::Match: return "Match";
  }
  return "Failed";
}

std::string_view match_mode_name(MatchMode mode) {
  switch (mode) {
    case MatchMode::Set: return "set";
    case MatchMode::Multiset: return "multiset";
    case MatchMode::Ordered: return "ordered";
  }
  return "set";
}

MatchMode match_mode_from_name(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "set") return MatchMode::Set;
  if (lower == "multiset") return MatchMode::Multiset;
  if (lower == "ordered") return MatchMode::Ordered;
  throw DataError("unknown match mode: " + std::string(name));
}

namespace {

struct DbCloser {
  void operator()(sqlite3* db) const { sqlite3_close_v2(db); }
};
struct StmtCloser {
  void operator()(sqlite3_stmt* s) const { sqlite3_finalize(s); }
};
using DbHandle = std::unique_ptr<sqlite3, DbCloser>;
using StmtHandle = std::unique_ptr<sqlite3_stmt, StmtCloser>;

void require_db_file(const fs::path& db) {
  std::error_code ec;
  if (!fs::is_regular_file(db, ec)) throw DbNotFound(db.string());
  std::ifstream probe(db, std::ios::binary);
  if (!probe) throw DbNotFound(db.string());
}

DbHandle open_read_only(const fs::path& db) {
  sqlite3* raw = nullptr;
  const int rc = sqlite3_open_v2(db.c_str(), &raw, SQLITE_OPEN_READONLY | SQLITE_OPEN_NOMUTEX, nullptr);
  DbHandle handle(raw);
  if (rc != SQLITE_OK) throw DbNotFound(db.string() + " (" + (raw ? sqlite3_errmsg(raw) : "open failed") + ")");
  sqlite3_exec(raw, "PRAGMA query_only = 1", nullptr, nullptr, nullptr);
  return handle;
}

bool is_syntax_message(std::string_view msg) {
  return msg.find("syntax error") != std::string_view::npos || msg.find("incomplete input") != std::string_view::npos ||
         msg.find("unrecognized token") != std::string_view::npos || msg.rfind("near \"", 0) == 0;
}

struct Deadline {
  std::chrono::steady_clock::time_point at;
  bool fired = false;
};

int progress_check(void* arg) {
  auto* d = static_cast<Deadline*>(arg);
  if (std::chrono::steady_clock::now() >= d->at) {
    d->fired = true;
    return 1;
  }
  return 0;
}

Value read_value(sqlite3_stmt* stmt, int i) {
  switch (sqlite3_column_type(stmt, i)) {
    case SQLITE_INTEGER: return static_cast<std::int64_t>(sqlite3_column_int64(stmt, i));
    case SQLITE_FLOAT: return sqlite3_column_double(stmt, i);
    case SQLITE_TEXT: {
      const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt, i));
      return std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt, i)));
    }
    case SQLITE_BLOB: {
      const auto* p = static_cast<const std::uint8_t*>(sqlite3_column_blob(stmt, i));
      const auto n = static_cast<std::size_t>(sqlite3_column_bytes(stmt, i));
      return Blob{std::vector<std::uint8_t>(p, p + n)};
    }
    default: return std::monostate{};
  }
}

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

ExecutionResult failure(Status status, std::string message, std::chrono::steady_clock::time_point start) {
  ExecutionResult r;
  r.status = status;
  r.error_message = std::move(message);
  r.elapsed_ms = ms_since(start);
  return r;
}

}  // namespace

ExecutionResult execute_sql(const fs::path& db, std::string_view sql, int timeout_ms) {
  if (timeout_ms <= 0) throw DomainError("timeout must be positive");
  require_db_file(db);
  const auto start = std::chrono::steady_clock::now();
  DbHandle conn = open_read_only(db);

  Deadline deadline{start + std::chrono::milliseconds(timeout_ms)};
  sqlite3_progress_handler(conn.get(), 1000, &progress_check, &deadline);

  sqlite3_stmt* raw = nullptr;
  const char* tail = nullptr;
  int rc = sqlite3_prepare_v2(conn.get(), sql.data(), static_cast<int>(sql.size()), &raw, &tail);
  StmtHandle stmt(raw);
  if (rc != SQLITE_OK) {
    if (deadline.fired) return failure(Status::Timeout, "timed out during prepare", start);
    std::string msg = sqlite3_errmsg(conn.get());
    const Status status = is_syntax_message(msg) ? Status::SyntaxError : Status::RuntimeError;
    return failure(status, std::move(msg), start);
  }
  if (!stmt) return failure(Status::SyntaxError, "empty statement", start);

  // a second statement in the tail makes the input multi-statement
  const char* end = sql.data() + sql.size();
  if (tail != nullptr && tail < end) {
    sqlite3_stmt* extra = nullptr;
    const int rc2 = sqlite3_prepare_v2(conn.get(), tail, static_cast<int>(end - tail), &extra, nullptr);
    StmtHandle extra_handle(extra);
    if (rc2 != SQLITE_OK || extra != nullptr) {
      return failure(Status::SyntaxError, "multiple statements are not allowed", start);
    }
  }
  if (!sqlite3_stmt_readonly(stmt.get())) {
    return failure(Status::RuntimeError, "statement is not read-only", start);
  }

  ExecutionResult result;
  const int ncol = sqlite3_column_count(stmt.get());
  for (int i = 0; i < ncol; ++i) {
    const char* name = sqlite3_column_name(stmt.get(), i);
    result.columns.emplace_back(name ? name : "");
  }
  std::vector<Row> rows;
  while ((rc = sqlite3_step(stmt.get())) == SQLITE_ROW) {
    Row row;
    row.reserve(static_cast<std::size_t>(ncol));
    for (int i = 0; i < ncol; ++i) row.push_back(read_value(stmt.get(), i));
    rows.push_back(std::move(row));
  }
  if (rc != SQLITE_DONE) {
    if (deadline.fired || rc == SQLITE_INTERRUPT) {
      return failure(Status::Timeout, "query exceeded " + std::to_string(timeout_ms) + " ms", start);
    }
    return failure(Status::RuntimeError, sqlite3_errmsg(conn.get()), start);
  }
  result.status = Status::Ok;
  result.rows = std::move(rows);
  result.elapsed_ms = ms_since(start);
  return result;
}

std::string value_key(const Value& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "N"; }
    std::string operator()(std::int64_t i) const { return "I" + std::to_string(i); }
    std::string operator()(double d) const {
      if (std::isnan(d)) return "RNaN";
      if (d == std::floor(d) && std::fabs(d) < 9.2e18) return "I" + std::to_string(static_cast<std::int64_t>(d));
      std::array<char, 64> buf{};
      const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), d);
      return "R" + std::string(buf.data(), res.ptr);
    }
    std::string operator()(const std::string& s) const { return "S" + std::to_string(s.size()) + ":" + s; }
    std::string operator()(const Blob& b) const {
      static constexpr char kHex[] = "0123456789abcdef";
      std::string out = "B" + std::to_string(b.bytes.size()) + ":";
      for (auto byte : b.bytes) {
        out.push_back(kHex[byte >> 4]);
        out.push_back(kHex[byte & 0xF]);
      }
      return out;
    }
  };
  return std::visit(Visitor{}, v);
}

std::string row_key(const Row& row) {
  std::string out = "(";
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out.push_back('|');
    out += value_key(row[i]);
  }
  out.push_back(')');
  return out;
}

namespace {

std::vector<std::string> keys(const std::vector<Row>& rows) {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(row_key(r));
  return out;
}

}  // namespace

bool denotation_match(const std::vector<Row>& pred, const std::vector<Row>& gold, MatchMode mode) {
  auto a = keys(pred);
  auto b = keys(gold);
  switch (mode) {
    case MatchMode::Ordered:
      return a == b;
    case MatchMode::Multiset:
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      return a == b;
    case MatchMode::Set:
      break;
  }
  return std::set<std::string>(a.begin(), a.end()) == std::set<std::string>(b.begin(), b.end());
}

bool denotation_match(const std::vector<Row>& pred, const std::vector<Row>& gold, bool order_sensitive) {
  return denotation_match(pred, gold, order_sensitive ? MatchMode::Ordered : MatchMode::Set);
}

std::string denotation_key(const std::vector<Row>& rows) {
  auto k = keys(rows);
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end()), k.end());
  std::string out;
  for (const auto& s : k) {
    out += s;
    out.push_back('\n');
  }
  return out;
}

Outcome classify_outcome(const ExecutionResult& pred, const ExecutionResult& gold, MatchMode mode) {
  if (!gold.ok()) throw GoldExecutionFailed(gold.error_message);
  if (!pred.ok()) return Outcome::Failed;
  return denotation_match(*pred.rows, *gold.rows, mode) ? Outcome::Match : Outcome::ExecutedMismatch;
}

std::vector<SchemaColumn> list_columns(const fs::path& db) {
  require_db_file(db);
  DbHandle conn = open_read_only(db);
  std::vector<SchemaColumn> out;
  std::vector<std::string> tables;
  {
    sqlite3_stmt* raw = nullptr;
    sqlite3_prepare_v2(conn.get(),
                       "SELECT name FROM sqlite_master WHERE type IN ('table','view') "
                       "AND name NOT LIKE 'sqlite_%' ORDER BY name",
                       -1, &raw, nullptr);
    StmtHandle stmt(raw);
    if (!stmt) throw DataError(std::string("cannot read schema: ") + sqlite3_errmsg(conn.get()));
    while (sqlite3_step(stmt.get()) == SQLITE_ROW) {
      tables.emplace_back(reinterpret_cast<const char*>(sqlite3_column_text(stmt.get(), 0)));
    }
  }
  for (const auto& t : tables) {
    sqlite3_stmt* raw = nullptr;
    sqlite3_prepare_v2(conn.get(), "SELECT name FROM pragma_table_info(?1)", -1, &raw, nullptr);
    StmtHandle stmt(raw);
    if (!stmt) continue;
    sqlite3_bind_text(stmt.get(), 1, t.c_str(), -1, SQLITE_TRANSIENT);
    while (sqlite3_step(stmt.get()) == SQLITE_ROW) {
      out.push_back({t, reinterpret_cast<const char*>(sqlite3_column_text(stmt.get(), 0))});
    }
  }
  return out;
}

fs::path resolve_db(const fs::path& root, std::string_view db_id) {
  const std::string id(db_id);
  if (id.empty() || id.find("..") != std::string::npos || id.find('/') != std::string::npos) {
    throw DbNotFound(id);
  }
  const fs::path candidates[] = {root / id / (id + ".sqlite"), root / (id + ".sqlite"), root / (id + ".db")};
  std::error_code ec;
  for (const auto& p : candidates)
    if (fs::is_regular_file(p, ec)) return p;
  throw DbNotFound((root / id).string());
}

Executor::Gate& Executor::gate_for(const fs::path& db) const {
  std::error_code ec;
  auto canonical = fs::weakly_canonical(db, ec);
  const std::string key = ec ? db.string() : canonical.string();
  std::lock_guard lock(gates_mu_);
  auto& slot = gates_[key];
  if (!slot) slot = std::make_unique<Gate>();
  return *slot;
}

ExecutionResult Executor::run(const fs::path& db, std::string_view sql, int timeout_ms) const {
  if (limit_ == 0) return execute_sql(db, sql, timeout_ms);
  Gate& gate = gate_for(db);
  {
    std::unique_lock lock(gate.mu);
    gate.cv.wait(lock, [&] { return gate.in_use < limit_; });
    ++gate.in_use;
  }
  struct Release {
    Gate& g;
    ~Release() {
      {
        std::lock_guard lock(g.mu);
        --g.in_use;
      }
      g.cv.notify_one();
    }
  } release{gate};
  return execute_sql(db, sql, timeout_ms);
}

ExecutionResult GoldCache::get(const Executor& executor, const fs::path& db, const std::string& sql, int timeout_ms) {
  auto key = std::make_pair(db.string(), sql);
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return *it->second;
  }
  auto result = std::make_shared<const ExecutionResult>(executor.run(db, sql, timeout_ms));
  // timeouts are load-dependent; only stable outcomes are memoized
  if (result->status != Status::Timeout) {
    std::lock_guard lock(mu_);
    cache_.emplace(std::move(key), result);
  }
  return *result;
}

std::size_t GoldCache::size() const {
  std::lock_guard lock(mu_);
  return cache_.size();
}

}  // namespace sqlreward::exec
