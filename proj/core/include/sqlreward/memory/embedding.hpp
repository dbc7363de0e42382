#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace sqlreward::memory {

using Vector = std::vector<double>;

inline constexpr std::size_t kDefaultDim = 1024;

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::size_t dim() const = 0;
  /// One vector per input, each of width dim(). Throws DomainError on empty
  /// text, ProviderUnavailable, DimensionMismatch.
  virtual std::vector<Vector> embed_batch(const std::vector<std::string>& texts) = 0;
  virtual std::string name() const = 0;

  Vector embed(const std::string& text);
};

/// Deterministic provider: signed feature hashing of lower-cased word
/// bigrams (the first word paired with a start marker), L2-normalized.
class StubProvider final : public EmbeddingProvider {
 public:
  explicit StubProvider(std::size_t dim = kDefaultDim);

  std::size_t dim() const override { return dim_; }
  std::vector<Vector> embed_batch(const std::vector<std::string>& texts) override;
  std::string name() const override { return "stub"; }

  Vector embed_one(const std::string& text) const;

 private:
  std::size_t dim_;
};

/// Fixed text -> vector table, e.g. loaded from a JSONL file of
/// `{"text": str, "embedding": [float...]}` rows (an optional "id" field
/// also becomes a lookup key). Unknown texts are ProviderUnavailable.
class StaticProvider final : public EmbeddingProvider {
 public:
  explicit StaticProvider(std::size_t dim);

  static std::unique_ptr<StaticProvider> from_file(const std::filesystem::path& file);

  void add(const std::string& key, Vector v);
  std::size_t dim() const override { return dim_; }
  std::vector<Vector> embed_batch(const std::vector<std::string>& texts) override;
  std::string name() const override { return "file"; }

 private:
  std::size_t dim_;
  std::map<std::string, Vector> table_;
};

/// POSTs `{"input": [...]}` to an OpenAI-compatible endpoint and reads
/// `{"data": [{"embedding": [...]}, ...]}`.
class HttpProvider final : public EmbeddingProvider {
 public:
  HttpProvider(std::string url, std::size_t dim, std::string model = {}, int timeout_ms = 30000);

  std::size_t dim() const override { return dim_; }
  std::vector<Vector> embed_batch(const std::vector<std::string>& texts) override;
  std::string name() const override { return "http"; }

 private:
  std::string scheme_host_;
  std::string path_;
  std::size_t dim_;
  std::string model_;
  int timeout_ms_;
};

struct ProviderConfig {
  std::string kind = "stub";  // stub | file | http
  std::size_t dim = kDefaultDim;
  std::string url;
  std::string file;
  std::string model;
  int timeout_ms = 30000;
};

std::shared_ptr<EmbeddingProvider> make_provider(const ProviderConfig& config);

double dot(const Vector& a, const Vector& b);
double norm(const Vector& v);
/// dot(a,b)/(|a||b|), 0 when either norm is 0. Throws DimensionMismatch.
double cosine(const Vector& a, const Vector& b);

}  // namespace sqlreward::memory
