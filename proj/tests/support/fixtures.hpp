#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>
#include <cstdint>

namespace sqlreward::testing {

/// Unique directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Creates (or replaces) a SQLite file by running `script`.
void build_db(const std::filesystem::path& file, std::string_view script);

/// Customers/orders database used across unit tests.
std::filesystem::path make_toy_db(const std::filesystem::path& file);

void write_text(const std::filesystem::path& file, std::string_view text);
std::string read_text(const std::filesystem::path& file);

/// Trace of `tokens` distinct words, `mentions` of which are qualified
/// references alternating over `columns` (all bigrams unique).
std::string synthetic_trace(std::size_t tokens, std::size_t mentions, const std::vector<std::string>& columns,
                            std::string_view salt = "w");

/// Trace of exactly 1001 tokens (1000 bigrams) of which `distinct_bigrams`
/// are distinct; 51 column mentions over `columns`.
std::string bigram_trace(std::size_t distinct_bigrams, const std::vector<std::string>& columns);

/// FNV-1a over the file bytes; used to prove files were not modified.
std::uint64_t file_hash(const std::filesystem::path& file);

}  // namespace sqlreward::testing
