#include "sqlreward/memory/quality_gate.hpp"

#include <cctype>
#include <set>
#include <sstream>
#include <unordered_set>

namespace sqlreward::memory {

std::string_view gate_reason_name(GateReason reason) {
  switch (reason) {
    case GateReason::Ok: return "OK";
    case GateReason::TooShort: return "TooShort";
    case GateReason::TooLong: return "TooLong";
    case GateReason::LowDensity: return "LowDensity";
    case GateReason::FewColumns: return "FewColumns";
    case GateReason::LowDiversity: return "LowDiversity";
  }
  return "OK";
}

namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool is_ident_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || c == '.' || u >= 0x80;
}

/// Trims punctuation (quotes, brackets, commas, a sentence-final period).
std::string strip(const std::string& tok) {
  std::size_t b = 0;
  std::size_t e = tok.size();
  while (b < e && !is_ident_char(tok[b])) ++b;
  while (e > b && (!is_ident_char(tok[e - 1]) || tok[e - 1] == '.')) --e;
  while (b < e && tok[b] == '.') ++b;
  return tok.substr(b, e - b);
}

}  // namespace

GateMetrics gate_metrics(std::string_view trace, const std::vector<std::string>& schema_columns) {
  std::unordered_set<std::string> columns;
  for (const auto& c : schema_columns) {
    std::string l = lower(c);
    if (auto dot = l.rfind('.'); dot != std::string::npos) l = l.substr(dot + 1);
    if (!l.empty()) columns.insert(std::move(l));
  }

  std::vector<std::string> tokens;
  {
    std::istringstream in{std::string(trace)};
    std::string w;
    while (in >> w) tokens.push_back(lower(std::move(w)));
  }

  GateMetrics m;
  m.token_count = tokens.size();
  std::size_t mentions = 0;
  std::set<std::string> distinct;
  for (const auto& t : tokens) {
    const std::string s = strip(t);
    if (s.empty()) continue;
    std::string col = s;
    if (auto dot = s.rfind('.'); dot != std::string::npos) col = s.substr(dot + 1);
    if (columns.count(col)) {
      ++mentions;
      distinct.insert(col);
    }
  }
  m.distinct_columns = distinct.size();
  if (!tokens.empty()) m.schema_density = static_cast<double>(mentions) / static_cast<double>(tokens.size());

  if (tokens.size() >= 2) {
    std::set<std::pair<std::string, std::string>> bigrams;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) bigrams.emplace(tokens[i], tokens[i + 1]);
    m.bigram_uniqueness = static_cast<double>(bigrams.size()) / static_cast<double>(tokens.size() - 1);
  }
  return m;
}

GateReport quality_gate(std::string_view trace, const std::vector<std::string>& schema_columns,
                        const GateThresholds& t) {
  GateReport r;
  r.metrics = gate_metrics(trace, schema_columns);
  const auto& m = r.metrics;
  if (m.token_count < t.min_tokens) r.reason = GateReason::TooShort;
  else if (m.token_count > t.max_tokens) r.reason = GateReason::TooLong;
  else if (m.schema_density < t.min_density) r.reason = GateReason::LowDensity;
  else if (m.distinct_columns < t.min_columns) r.reason = GateReason::FewColumns;
  else if (m.bigram_uniqueness < t.min_bigram_uniqueness) r.reason = GateReason::LowDiversity;
  else r.reason = GateReason::Ok;
  r.accepted = r.reason == GateReason::Ok;
  return r;
}

}  // namespace sqlreward::memory
