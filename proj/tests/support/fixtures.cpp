#include "fixtures.hpp"

#include <sqlite3.h>

#include <atomic>
#include <chrono>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace sqlreward::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  path_ = fs::temp_directory_path() /
          ("sqlreward-test-" + std::to_string(stamp) + "-" + std::to_string(counter.fetch_add(1)));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void build_db(const fs::path& file, std::string_view script) {
  std::error_code ec;
  fs::remove(file, ec);
  fs::create_directories(file.parent_path(), ec);
  sqlite3* db = nullptr;
  if (sqlite3_open(file.c_str(), &db) != SQLITE_OK) throw std::runtime_error("cannot create " + file.string());
  char* err = nullptr;
  const std::string sql(script);
  const int rc = sqlite3_exec(db, sql.c_str(), nullptr, nullptr, &err);
  std::string msg = err ? err : "";
  sqlite3_free(err);
  sqlite3_close(db);
  if (rc != SQLITE_OK) throw std::runtime_error("fixture script failed: " + msg);
}

fs::path make_toy_db(const fs::path& file) {
  build_db(file, R"(
    CREATE TABLE cust(id INTEGER PRIMARY KEY, name TEXT, ct TEXT);
    CREATE TABLE orders(id INTEGER PRIMARY KEY, cid INTEGER REFERENCES cust(id), total REAL, name TEXT);
    INSERT INTO cust VALUES (1,'ann','AU'),(2,'bob','US'),(3,'cyd','AU'),(4,'dee','NZ');
    INSERT INTO orders VALUES (1,1,10.0,'pen'),(2,1,25.5,'ink'),(3,2,7.0,'pad'),(4,3,99.0,'pen'),(5,4,3.0,'cap');
  )");
  return file;
}

void write_text(const fs::path& file, std::string_view text) {
  std::ofstream out(file, std::ios::binary);
  out << text;
}

std::string read_text(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string synthetic_trace(std::size_t tokens, std::size_t mentions, const std::vector<std::string>& columns,
                            std::string_view salt) {
  std::string out;
  const std::size_t step = mentions == 0 ? tokens + 1 : tokens / mentions;
  std::size_t placed = 0;
  for (std::size_t i = 0; i < tokens; ++i) {
    if (!out.empty()) out.push_back(' ');
    if (placed < mentions && i % step == 0) {
      out += "q" + std::to_string(i) + "." + columns[placed % columns.size()];
      ++placed;
    } else {
      out += std::string(salt) + std::to_string(i);
    }
  }
  return out;
}

std::string bigram_trace(std::size_t distinct_bigrams, const std::vector<std::string>& columns) {
  // D unique words give D-1 bigrams; the run of "r" adds (last,r) and (r,r)
  const std::size_t unique = distinct_bigrams - 1;
  std::string out = synthetic_trace(unique, 51, columns);
  for (std::size_t i = unique; i < 1001; ++i) out += " r";
  return out;
}

std::uint64_t file_hash(const fs::path& file) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : read_text(file)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace sqlreward::testing
