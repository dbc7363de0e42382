#pragma once

#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "sqlreward/enrich/pool.hpp"
#include "sqlreward/exec/executor.hpp"
#include "sqlreward/memory/bank.hpp"
#include "sqlreward/reward/reward.hpp"

namespace sqlreward::io {

using nlohmann::json;

/// Non-blank lines parsed as JSON. Throws DataError naming file and line.
std::vector<json> read_jsonl(const std::filesystem::path& file);
/// Writes to a sibling temp file, then renames over `file`.
void write_jsonl(const std::filesystem::path& file, const std::vector<json>& rows);
json read_json(const std::filesystem::path& file);
void write_json(const std::filesystem::path& file, const json& value);

/// String ids; integral JSON ids are rendered in decimal.
std::string id_string(const json& v);

struct DatasetItem {
  std::string question_id;
  std::string db_id;
  std::string question;
  std::string evidence;
  std::string sql;
};

/// BIRD rows (`SQL`) or Spider rows (`query`); a missing question_id
/// becomes the zero-based row index.
std::vector<DatasetItem> load_dataset(const std::filesystem::path& file);
DatasetItem dataset_item_from_json(const json& row, std::size_t index);

struct CandidateRow {
  std::string question_id;
  std::string db_id;
  std::string sql;
};

/// `{"question_id","db_id","sql"}` rows.
std::vector<CandidateRow> load_candidate_rows(const std::filesystem::path& file);

struct CandidateSet {
  std::string question_id;
  std::string db_id;
  std::vector<std::string> candidates;
  std::vector<std::string> traces;
};

/// `{"question_id","db_id","candidates":[...],"traces":[...]}` rows.
std::vector<CandidateSet> load_candidate_sets(const std::filesystem::path& file);
CandidateSet candidate_set_from_json(const json& row);

json to_json(const enrich::ReferencePool& pool);
enrich::ReferencePool pool_from_json(const json& row);
std::vector<enrich::ReferencePool> load_pools(const std::filesystem::path& file);
void save_pools(const std::filesystem::path& file, const std::vector<enrich::ReferencePool>& pools);
json to_json(const enrich::AuditReport& report);

std::vector<memory::SeedRecord> load_seeds(const std::filesystem::path& file);

json to_json(const exec::Value& v);
json to_json(const exec::ExecutionResult& r);
json to_json(const reward::RewardBreakdown& b);
json to_json(const memory::GateReport& g);
json to_json(const memory::MemoryEntry& e, bool with_embedding = false);
json to_json(const memory::BankStats& s);

}  // namespace sqlreward::io
