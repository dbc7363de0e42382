#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "sqlreward/memory/embedding.hpp"
#include "sqlreward/memory/quality_gate.hpp"

namespace sqlreward::memory {

enum class Source { Seed, Student };
enum class Scope { CrossDB, SameOnly, Mixed };

std::string_view source_name(Source s);
std::string_view scope_name(Scope s);
/// Accepts the canonical names case-insensitively. Throws DataError.
Scope scope_from_name(std::string_view name);

inline constexpr std::size_t kDefaultTopK = 20;
inline constexpr double kDuplicateThreshold = 0.9;

struct MemoryEntry {
  std::string id;
  std::string db_id;
  std::string trace;
  Vector embedding;
  std::string created_at;  // ISO-8601 UTC
  Source source = Source::Seed;
};

struct SeedRecord {
  std::string trace;  // raw output; a <think> block, when present, is the trace
  std::string db_id;
  bool exec_correct = false;
};

struct InsertOutcome {
  enum class Kind { Inserted, GateRejected, Duplicate };
  Kind kind = Kind::GateRejected;
  std::string id;           // Inserted
  GateReport gate;          // always filled
  double similarity = 0.0;  // top-1 cosine against the bank before the insert
};

std::string_view insert_kind_name(InsertOutcome::Kind kind);

struct BankStats {
  std::size_t size = 0;
  std::size_t dim = 0;
  std::size_t seeds = 0;
  std::size_t students = 0;
  std::map<std::string, std::size_t> per_db;
};

/// Text between the first `<think>` and its `</think>`; the whole input
/// (trimmed) when no complete block exists.
std::string extract_think(std::string_view text);

/// Componentwise mean. Throws EmptyRetrieval / DimensionMismatch.
Vector centroid(const std::vector<MemoryEntry>& entries);

/// Exact full-scan vector memory keyed by database id. Readers share a
/// lock; inserts take it exclusively, so the bank is shareable across
/// threads. Entries are never removed or mutated.
class MemoryBank {
 public:
  MemoryBank(std::shared_ptr<EmbeddingProvider> provider, std::size_t dim);

  /// Stores every exec-correct seed (no gate, no dedup).
  static std::unique_ptr<MemoryBank> init(const std::vector<SeedRecord>& seeds,
                                          std::shared_ptr<EmbeddingProvider> provider, std::size_t dim);

  /// Top-k by cosine among entries admitted by `scope`; ties keep insertion
  /// order. Throws DomainError for k == 0, DimensionMismatch.
  std::vector<MemoryEntry> retrieve(const Vector& query, std::string_view db_id, std::size_t k, Scope scope) const;

  /// Gate, embed, dedup against the whole bank, append.
  InsertOutcome insert(const std::string& trace, const std::string& db_id,
                       const std::vector<std::string>& schema_columns, const GateThresholds& thresholds = {},
                       double duplicate_threshold = kDuplicateThreshold);

  /// Appends without gate or dedup; assigns id/created_at when empty.
  std::string add(MemoryEntry entry);

  /// Newline-delimited JSON written to a temp file and renamed into place.
  void save(const std::filesystem::path& file) const;
  /// Missing file gives an empty bank.
  static std::unique_ptr<MemoryBank> load(const std::filesystem::path& file,
                                          std::shared_ptr<EmbeddingProvider> provider, std::size_t dim);

  std::size_t size() const;
  std::size_t dim() const { return dim_; }
  BankStats stats() const;
  std::vector<MemoryEntry> entries() const;
  EmbeddingProvider& provider() const { return *provider_; }
  std::shared_ptr<EmbeddingProvider> provider_handle() const { return provider_; }

 private:
  std::string add_locked(MemoryEntry entry);
  std::string next_id_locked(Source source);

  std::shared_ptr<EmbeddingProvider> provider_;
  std::size_t dim_;
  mutable std::shared_mutex mu_;
  std::vector<MemoryEntry> entries_;
  std::vector<double> norms_;
  std::set<std::string> ids_;
  std::size_t seq_ = 0;
};

}  // namespace sqlreward::memory
