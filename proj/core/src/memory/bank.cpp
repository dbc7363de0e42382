#include "sqlreward/memory/bank.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <ctime>
#include <fstream>
#include <mutex>
#include <nlohmann/json.hpp>

#include "sqlreward/errors.hpp"

namespace sqlreward::memory {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view source_name(Source s) { return s == Source::Seed ? "SEED" : "STUDENT"; }

std::string_view scope_name(Scope s) {
  switch (s) {
    case Scope::CrossDB: return "CrossDB";
    case Scope::SameOnly: return "SameOnly";
    case Scope::Mixed: return "Mixed";
  }
  return "CrossDB";
}

Scope scope_from_name(std::string_view name) {
  std::string l(name);
  for (auto& c : l) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (l == "crossdb" || l == "cross_db" || l == "cross") return Scope::CrossDB;
  if (l == "sameonly" || l == "same_only" || l == "same") return Scope::SameOnly;
  if (l == "mixed") return Scope::Mixed;
  throw DataError("unknown retrieval scope: " + std::string(name));
}

std::string_view insert_kind_name(InsertOutcome::Kind kind) {
  switch (kind) {
    case InsertOutcome::Kind::Inserted: return "Inserted";
    case InsertOutcome::Kind::GateRejected: return "GateRejected";
    case InsertOutcome::Kind::Duplicate: return "Duplicate";
  }
  return "GateRejected";
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool admitted(const MemoryEntry& e, std::string_view db_id, Scope scope) {
  switch (scope) {
    case Scope::CrossDB: return e.db_id != db_id;
    case Scope::SameOnly: return e.db_id == db_id;
    case Scope::Mixed: return true;
  }
  return true;
}

json entry_to_json(const MemoryEntry& e) {
  return {{"id", e.id},
          {"db_id", e.db_id},
          {"trace", e.trace},
          {"embedding", e.embedding},
          {"source", source_name(e.source)},
          {"created_at", e.created_at}};
}

MemoryEntry entry_from_json(const json& j) {
  MemoryEntry e;
  e.id = j.at("id").get<std::string>();
  e.db_id = j.at("db_id").get<std::string>();
  e.trace = j.at("trace").get<std::string>();
  e.embedding = j.at("embedding").get<Vector>();
  e.created_at = j.value("created_at", std::string());
  const auto src = j.value("source", std::string("SEED"));
  if (src == "SEED") e.source = Source::Seed;
  else if (src == "STUDENT") e.source = Source::Student;
  else throw DataError("unknown memory source: " + src);
  return e;
}

}  // namespace

std::string extract_think(std::string_view text) {
  const auto open = text.find("<think>");
  if (open != std::string_view::npos) {
    const auto body = open + 7;
    const auto close = text.find("</think>", body);
    if (close != std::string_view::npos) return trim(text.substr(body, close - body));
  }
  return trim(text);
}

Vector centroid(const std::vector<MemoryEntry>& entries) {
  if (entries.empty()) throw EmptyRetrieval();
  const std::size_t d = entries.front().embedding.size();
  Vector c(d, 0.0);
  for (const auto& e : entries) {
    if (e.embedding.size() != d) throw DimensionMismatch(d, e.embedding.size());
    for (std::size_t i = 0; i < d; ++i) c[i] += e.embedding[i];
  }
  const double n = static_cast<double>(entries.size());
  for (auto& x : c) x /= n;
  return c;
}

MemoryBank::MemoryBank(std::shared_ptr<EmbeddingProvider> provider, std::size_t dim)
    : provider_(std::move(provider)), dim_(dim) {
  if (!provider_) throw DomainError("memory bank needs an embedding provider");
  if (provider_->dim() != dim_) throw DimensionMismatch(dim_, provider_->dim());
}

std::unique_ptr<MemoryBank> MemoryBank::init(const std::vector<SeedRecord>& seeds,
                                             std::shared_ptr<EmbeddingProvider> provider, std::size_t dim) {
  auto bank = std::make_unique<MemoryBank>(std::move(provider), dim);
  std::vector<const SeedRecord*> kept;
  std::vector<std::string> traces;
  for (const auto& s : seeds) {
    if (!s.exec_correct) continue;
    kept.push_back(&s);
    traces.push_back(extract_think(s.trace));
  }
  if (traces.empty()) return bank;
  auto vectors = bank->provider_->embed_batch(traces);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    MemoryEntry e;
    e.db_id = kept[i]->db_id;
    e.trace = std::move(traces[i]);
    e.embedding = std::move(vectors[i]);
    e.source = Source::Seed;
    bank->add(std::move(e));
  }
  return bank;
}

std::vector<MemoryEntry> MemoryBank::retrieve(const Vector& query, std::string_view db_id, std::size_t k,
                                              Scope scope) const {
  if (k == 0) throw DomainError("k must be at least 1");
  if (query.size() != dim_) throw DimensionMismatch(dim_, query.size());
  const double qn = norm(query);
  std::shared_lock lock(mu_);
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!admitted(entries_[i], db_id, scope)) continue;
    const double denom = qn * norms_[i];
    scored.emplace_back(denom == 0.0 ? 0.0 : dot(query, entries_[i].embedding) / denom, i);
  }
  const std::size_t n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                    [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
  std::vector<MemoryEntry> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(entries_[scored[i].second]);
  return out;
}

InsertOutcome MemoryBank::insert(const std::string& trace, const std::string& db_id,
                                 const std::vector<std::string>& schema_columns, const GateThresholds& thresholds,
                                 double duplicate_threshold) {
  InsertOutcome out;
  out.gate = quality_gate(trace, schema_columns, thresholds);
  if (!out.gate.accepted) {
    out.kind = InsertOutcome::Kind::GateRejected;
    return out;
  }
  Vector v = provider_->embed(trace);
  if (v.size() != dim_) throw DimensionMismatch(dim_, v.size());
  const double vn = norm(v);

  std::unique_lock lock(mu_);
  double best = -1.0;
  bool any = false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const double denom = vn * norms_[i];
    const double s = denom == 0.0 ? 0.0 : dot(v, entries_[i].embedding) / denom;
    if (!any || s > best) best = s;
    any = true;
  }
  out.similarity = any ? best : 0.0;
  if (any && best >= duplicate_threshold) {
    out.kind = InsertOutcome::Kind::Duplicate;
    return out;
  }
  MemoryEntry e;
  e.db_id = db_id;
  e.trace = trace;
  e.embedding = std::move(v);
  e.source = Source::Student;
  out.id = add_locked(std::move(e));
  out.kind = InsertOutcome::Kind::Inserted;
  return out;
}

std::string MemoryBank::add(MemoryEntry entry) {
  std::unique_lock lock(mu_);
  return add_locked(std::move(entry));
}

std::string MemoryBank::next_id_locked(Source source) {
  const std::string prefix = source == Source::Seed ? "seed-" : "mem-";
  std::string id;
  do {
    id = prefix + std::to_string(++seq_);
  } while (ids_.count(id));
  return id;
}

std::string MemoryBank::add_locked(MemoryEntry entry) {
  if (entry.embedding.size() != dim_) throw DimensionMismatch(dim_, entry.embedding.size());
  if (entry.id.empty()) entry.id = next_id_locked(entry.source);
  if (ids_.count(entry.id)) throw DataError("duplicate memory id: " + entry.id);
  if (entry.created_at.empty()) entry.created_at = now_iso8601();
  ids_.insert(entry.id);
  norms_.push_back(norm(entry.embedding));
  entries_.push_back(std::move(entry));
  return entries_.back().id;
}

void MemoryBank::save(const fs::path& file) const {
  std::error_code ec;
  if (file.has_parent_path()) fs::create_directories(file.parent_path(), ec);
  fs::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write snapshot " + tmp.string());
    std::shared_lock lock(mu_);
    for (const auto& e : entries_) out << entry_to_json(e).dump() << '\n';
    out.flush();
    if (!out) throw DataError("failed writing snapshot " + tmp.string());
  }
  fs::rename(tmp, file, ec);
  if (ec) throw DataError("cannot replace snapshot " + file.string() + ": " + ec.message());
}

std::unique_ptr<MemoryBank> MemoryBank::load(const fs::path& file, std::shared_ptr<EmbeddingProvider> provider,
                                             std::size_t dim) {
  auto bank = std::make_unique<MemoryBank>(std::move(provider), dim);
  std::ifstream in(file);
  if (!in) return bank;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      bank->add(entry_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw DataError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return bank;
}

std::size_t MemoryBank::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

BankStats MemoryBank::stats() const {
  std::shared_lock lock(mu_);
  BankStats s;
  s.size = entries_.size();
  s.dim = dim_;
  for (const auto& e : entries_) {
    (e.source == Source::Seed ? s.seeds : s.students) += 1;
    s.per_db[e.db_id] += 1;
  }
  return s;
}

std::vector<MemoryEntry> MemoryBank::entries() const {
  std::shared_lock lock(mu_);
  return entries_;
}

}  // namespace sqlreward::memory
