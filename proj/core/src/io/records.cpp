#include "sqlreward/io/records.hpp"

#include <cctype>
#include <fstream>

#include "sqlreward/errors.hpp"

namespace sqlreward::io {

namespace fs = std::filesystem;

std::vector<json> read_jsonl(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open " + file.string());
  std::vector<json> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw DataError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

namespace {

void write_atomic(const fs::path& file, const std::string& body) {
  std::error_code ec;
  if (file.has_parent_path()) fs::create_directories(file.parent_path(), ec);
  fs::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << body;
    if (!out) throw DataError("failed writing " + tmp.string());
  }
  fs::rename(tmp, file, ec);
  if (ec) throw DataError("cannot replace " + file.string() + ": " + ec.message());
}

std::string str_field(const json& row, const char* key, const std::string& fallback = {}) {
  auto it = row.find(key);
  if (it == row.end() || it->is_null()) return fallback;
  if (it->is_string()) return it->get<std::string>();
  return it->dump();
}

template <typename F>
auto wrap(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw DataError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

void write_jsonl(const fs::path& file, const std::vector<json>& rows) {
  std::string body;
  for (const auto& r : rows) body += r.dump() + "\n";
  write_atomic(file, body);
}

json read_json(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open " + file.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(file.string() + ": " + e.what());
  }
}

void write_json(const fs::path& file, const json& value) { write_atomic(file, value.dump(2) + "\n"); }

std::string id_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  return v.dump();
}

DatasetItem dataset_item_from_json(const json& row, std::size_t index) {
  DatasetItem d;
  d.question_id = row.contains("question_id") ? id_string(row.at("question_id")) : std::to_string(index);
  d.db_id = str_field(row, "db_id");
  d.question = str_field(row, "question");
  d.evidence = str_field(row, "evidence");
  d.sql = row.contains("SQL") ? str_field(row, "SQL") : str_field(row, "query");
  if (d.db_id.empty()) throw DataError("dataset row " + std::to_string(index) + " has no db_id");
  if (d.sql.empty()) throw DataError("dataset row " + std::to_string(index) + " has no SQL");
  return d;
}

std::vector<DatasetItem> load_dataset(const fs::path& file) {
  std::vector<json> rows;
  // a JSON array file (Spider ships these) or JSONL
  std::ifstream probe(file);
  char first = 0;
  while (probe.get(first) && std::isspace(static_cast<unsigned char>(first))) {
  }
  if (first == '[') {
    for (auto& r : read_json(file)) rows.push_back(std::move(r));
  } else {
    rows = read_jsonl(file);
  }
  std::vector<DatasetItem> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out.push_back(dataset_item_from_json(rows[i], i));
  return out;
}

std::vector<CandidateRow> load_candidate_rows(const fs::path& file) {
  std::vector<CandidateRow> out;
  for (const auto& r : read_jsonl(file)) {
    out.push_back(wrap("candidate row", [&] {
      return CandidateRow{id_string(r.at("question_id")), str_field(r, "db_id"), r.at("sql").get<std::string>()};
    }));
  }
  return out;
}

CandidateSet candidate_set_from_json(const json& r) {
  return wrap("candidate set", [&] {
    CandidateSet c;
    c.question_id = id_string(r.at("question_id"));
    c.db_id = str_field(r, "db_id");
    c.candidates = r.at("candidates").get<std::vector<std::string>>();
    if (r.contains("traces")) c.traces = r.at("traces").get<std::vector<std::string>>();
    return c;
  });
}

std::vector<CandidateSet> load_candidate_sets(const fs::path& file) {
  std::vector<CandidateSet> out;
  for (const auto& r : read_jsonl(file)) out.push_back(candidate_set_from_json(r));
  return out;
}

json to_json(const enrich::ReferencePool& p) {
  return {{"question_id", p.question_id},
          {"db_id", p.db_id},
          {"gold", p.gold},
          {"variants", p.variants},
          {"empty_gold", p.empty_gold}};
}

enrich::ReferencePool pool_from_json(const json& r) {
  return wrap("reference pool", [&] {
    enrich::ReferencePool p;
    p.question_id = id_string(r.at("question_id"));
    p.db_id = str_field(r, "db_id");
    p.gold = r.at("gold").get<std::string>();
    p.variants = r.value("variants", std::vector<std::string>{});
    p.empty_gold = r.value("empty_gold", false);
    return p;
  });
}

std::vector<enrich::ReferencePool> load_pools(const fs::path& file) {
  std::vector<enrich::ReferencePool> out;
  for (const auto& r : read_jsonl(file)) out.push_back(pool_from_json(r));
  return out;
}

void save_pools(const fs::path& file, const std::vector<enrich::ReferencePool>& pools) {
  std::vector<json> rows;
  rows.reserve(pools.size());
  for (const auto& p : pools) rows.push_back(to_json(p));
  write_jsonl(file, rows);
}

json to_json(const enrich::AuditReport& r) {
  return {{"total", r.total},
          {"empty_gold_count", r.empty_gold_count},
          {"ratio", r.ratio},
          {"flagged_question_ids", r.flagged_question_ids}};
}

std::vector<memory::SeedRecord> load_seeds(const fs::path& file) {
  std::vector<memory::SeedRecord> out;
  for (const auto& r : read_jsonl(file)) {
    out.push_back(wrap("seed row", [&] {
      memory::SeedRecord s;
      s.trace = r.contains("trace") ? r.at("trace").get<std::string>() : r.at("output").get<std::string>();
      s.db_id = r.at("db_id").get<std::string>();
      s.exec_correct = r.value("exec_correct", false);
      return s;
    }));
  }
  return out;
}

json to_json(const exec::Value& v) {
  struct Visitor {
    json operator()(std::monostate) const { return nullptr; }
    json operator()(std::int64_t i) const { return i; }
    json operator()(double d) const { return d; }
    json operator()(const std::string& s) const { return s; }
    json operator()(const exec::Blob& b) const {
      static constexpr char kHex[] = "0123456789abcdef";
      std::string hex;
      for (auto byte : b.bytes) {
        hex.push_back(kHex[byte >> 4]);
        hex.push_back(kHex[byte & 0xF]);
      }
      return json{{"blob", hex}};
    }
  };
  return std::visit(Visitor{}, v);
}

json to_json(const exec::ExecutionResult& r) {
  json j = {{"status", exec::status_name(r.status)}, {"elapsed_ms", r.elapsed_ms}};
  if (r.rows) {
    json rows = json::array();
    for (const auto& row : *r.rows) {
      json jr = json::array();
      for (const auto& v : row) jr.push_back(to_json(v));
      rows.push_back(std::move(jr));
    }
    j["columns"] = r.columns;
    j["rows"] = std::move(rows);
  } else {
    j["error_message"] = r.error_message;
  }
  return j;
}

json to_json(const reward::RewardBreakdown& b) {
  return {{"format", b.format}, {"exec", b.exec},     {"atomic", b.atomic},
          {"memory", b.memory}, {"total", b.total}, {"outcome", exec::outcome_name(b.outcome)}};
}

json to_json(const memory::GateReport& g) {
  return {{"accepted", g.accepted},
          {"reason", memory::gate_reason_name(g.reason)},
          {"metrics",
           {{"token_count", g.metrics.token_count},
            {"schema_density", g.metrics.schema_density},
            {"distinct_columns", g.metrics.distinct_columns},
            {"bigram_uniqueness", g.metrics.bigram_uniqueness}}}};
}

json to_json(const memory::MemoryEntry& e, bool with_embedding) {
  json j = {{"id", e.id},
            {"db_id", e.db_id},
            {"trace", e.trace},
            {"source", memory::source_name(e.source)},
            {"created_at", e.created_at}};
  if (with_embedding) j["embedding"] = e.embedding;
  return j;
}

json to_json(const memory::BankStats& s) {
  return {{"bank_size", s.size}, {"dims", s.dim}, {"seeds", s.seeds}, {"students", s.students}, {"per_db", s.per_db}};
}

}  // namespace sqlreward::io
