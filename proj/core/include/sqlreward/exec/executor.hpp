#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sqlreward::exec {

enum class Status { Ok, SyntaxError, RuntimeError, Timeout };

std::string_view status_name(Status status);

struct Blob {
  std::vector<std::uint8_t> bytes;
  friend bool operator==(const Blob&, const Blob&) = default;
};

/// One SQLite scalar. NULL is std::monostate.
using Value = std::variant<std::monostate, std::int64_t, double, std::string, Blob>;
using Row = std::vector<Value>;

struct ExecutionResult {
  Status status = Status::RuntimeError;
  std::optional<std::vector<Row>> rows;  // engaged iff status == Ok
  std::vector<std::string> columns;
  double elapsed_ms = 0.0;
  std::string error_message;  // non-empty iff status != Ok

  bool ok() const { return status == Status::Ok; }
};

inline constexpr int kEvalTimeoutMs = 30000;
inline constexpr int kRewardTimeoutMs = 5000;

/// Runs one read-only statement. Throws DbNotFound when `db` is not a
/// readable file; every SQL failure is reported through the status.
ExecutionResult execute_sql(const std::filesystem::path& db, std::string_view sql, int timeout_ms);

/// Row comparison semantics. Set is the default (duplicates and order
/// ignored); Multiset keeps duplicate counts; Ordered compares sequences.
enum class MatchMode { Set, Multiset, Ordered };

std::string_view match_mode_name(MatchMode mode);
/// "set", "multiset" or "ordered", case-insensitive. Throws DataError.
MatchMode match_mode_from_name(std::string_view name);

/// Canonical text of one value: integral reals fold to integers so that
/// 1.0 and 1 compare equal; NULL equals NULL.
std::string value_key(const Value& v);
std::string row_key(const Row& row);

bool denotation_match(const std::vector<Row>& pred, const std::vector<Row>& gold, bool order_sensitive = false);
bool denotation_match(const std::vector<Row>& pred, const std::vector<Row>& gold, MatchMode mode);

/// Order-free canonical form of a result set (sorted distinct row keys).
/// Equal keys ⇔ denotation_match under MatchMode::Set.
std::string denotation_key(const std::vector<Row>& rows);

enum class Outcome { Failed, ExecutedMismatch, Match };

std::string_view outcome_name(Outcome outcome);

/// Throws GoldExecutionFailed when `gold` did not run.
Outcome classify_outcome(const ExecutionResult& pred, const ExecutionResult& gold, MatchMode mode = MatchMode::Set);

struct SchemaColumn {
  std::string table;
  std::string column;
};

/// Tables and columns of every user table in the database.
std::vector<SchemaColumn> list_columns(const std::filesystem::path& db);

/// Resolves a database id under a BIRD/Spider-style root:
/// `<root>/<id>/<id>.sqlite`, then `<root>/<id>.sqlite`, then `<root>/<id>.db`.
/// Throws DbNotFound.
std::filesystem::path resolve_db(const std::filesystem::path& root, std::string_view db_id);

/// Executes with a cap on concurrent connections per database file.
/// A limit of 0 disables the cap. Thread-safe.
class Executor {
 public:
  explicit Executor(std::size_t per_db_limit = 0) : limit_(per_db_limit) {}

  ExecutionResult run(const std::filesystem::path& db, std::string_view sql, int timeout_ms) const;

  std::size_t per_db_limit() const { return limit_; }

 private:
  struct Gate {
    std::mutex mu;
    std::condition_variable cv;
    std::size_t in_use = 0;
  };

  Gate& gate_for(const std::filesystem::path& db) const;

  std::size_t limit_;
  mutable std::mutex gates_mu_;
  mutable std::map<std::string, std::unique_ptr<Gate>> gates_;
};

/// Memoizes gold executions per (db, sql). Thread-safe.
class GoldCache {
 public:
  ExecutionResult get(const Executor& executor, const std::filesystem::path& db, const std::string& sql,
                      int timeout_ms);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::pair<std::string, std::string>, std::shared_ptr<const ExecutionResult>> cache_;
};

}  // namespace sqlreward::exec
