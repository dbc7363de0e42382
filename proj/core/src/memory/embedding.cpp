#include "sqlreward/memory/embedding.hpp"

#include <httplib.h>

#include <cctype>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "sqlreward/errors.hpp"

namespace sqlreward::memory {

using nlohmann::json;

Vector EmbeddingProvider::embed(const std::string& text) { return embed_batch({text}).at(0); }

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<std::string> lower_words(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string w;
  while (in >> w) {
    for (auto& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.push_back(std::move(w));
  }
  return out;
}

void check_non_empty(const std::string& text) {
  for (unsigned char c : text)
    if (!std::isspace(c)) return;
  throw DomainError("cannot embed empty text");
}

}  // namespace

StubProvider::StubProvider(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw DomainError("embedding dimension must be positive");
}

Vector StubProvider::embed_one(const std::string& text) const {
  check_non_empty(text);
  const auto words = lower_words(text);
  Vector v(dim_, 0.0);
  std::string prev = "\x02";  // start marker
  for (const auto& w : words) {
    const std::uint64_t h = fnv1a(prev + '\x1f' + w);
    v[h % dim_] += (h >> 63) ? -1.0 : 1.0;
    prev = w;
  }
  const double n = norm(v);
  if (n > 0)
    for (auto& x : v) x /= n;
  return v;
}

std::vector<Vector> StubProvider::embed_batch(const std::vector<std::string>& texts) {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

StaticProvider::StaticProvider(std::size_t dim) : dim_(dim) {}

void StaticProvider::add(const std::string& key, Vector v) {
  if (v.size() != dim_) throw DimensionMismatch(dim_, v.size());
  table_[key] = std::move(v);
}

std::unique_ptr<StaticProvider> StaticProvider::from_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ProviderUnavailable("cannot open embedding file " + file.string());
  std::unique_ptr<StaticProvider> provider;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!row.contains("embedding")) throw DataError(file.string() + ":" + std::to_string(lineno) + ": no embedding");
    Vector v = row.at("embedding").get<Vector>();
    if (!provider) provider = std::make_unique<StaticProvider>(v.size());
    if (row.contains("text")) provider->add(row.at("text").get<std::string>(), v);
    if (row.contains("id")) provider->add(row.at("id").get<std::string>(), v);
  }
  if (!provider) throw DataError("embedding file is empty: " + file.string());
  return provider;
}

std::vector<Vector> StaticProvider::embed_batch(const std::vector<std::string>& texts) {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    check_non_empty(t);
    auto it = table_.find(t);
    if (it == table_.end()) throw ProviderUnavailable("no precomputed embedding for text");
    out.push_back(it->second);
  }
  return out;
}

HttpProvider::HttpProvider(std::string url, std::size_t dim, std::string model, int timeout_ms)
    : dim_(dim), model_(std::move(model)), timeout_ms_(timeout_ms) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw DataError("embedding URL needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  scheme_host_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

std::vector<Vector> HttpProvider::embed_batch(const std::vector<std::string>& texts) {
  for (const auto& t : texts) check_non_empty(t);
  if (texts.empty()) return {};
  httplib::Client client(scheme_host_);
  const auto secs = timeout_ms_ / 1000;
  const auto usecs = (timeout_ms_ % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  json body = {{"input", texts}};
  if (!model_.empty()) body["model"] = model_;
  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) throw ProviderUnavailable("embedding endpoint unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200) throw ProviderUnavailable("embedding endpoint returned HTTP " + std::to_string(res->status));
  std::vector<Vector> out;
  try {
    const auto reply = json::parse(res->body);
    for (const auto& item : reply.at("data")) out.push_back(item.at("embedding").get<Vector>());
  } catch (const json::exception& e) {
    throw ProviderUnavailable(std::string("malformed embedding response: ") + e.what());
  }
  if (out.size() != texts.size()) {
    throw ProviderUnavailable("embedding endpoint returned " + std::to_string(out.size()) + " vectors for " +
                              std::to_string(texts.size()) + " inputs");
  }
  for (const auto& v : out)
    if (v.size() != dim_) throw DimensionMismatch(dim_, v.size());
  return out;
}

std::shared_ptr<EmbeddingProvider> make_provider(const ProviderConfig& config) {
  if (config.kind == "stub") return std::make_shared<StubProvider>(config.dim);
  if (config.kind == "file") {
    auto p = StaticProvider::from_file(config.file);
    if (p->dim() != config.dim) throw DimensionMismatch(config.dim, p->dim());
    return p;
  }
  if (config.kind == "http") return std::make_shared<HttpProvider>(config.url, config.dim, config.model, config.timeout_ms);
  throw DataError("unknown embedding provider: " + config.kind);
}

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vector& v) { return std::sqrt(dot(v, v)); }

double cosine(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

}  // namespace sqlreward::memory
