#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>

#include "sqlreward/service/service.hpp"

namespace sqlreward::service {

/// One JSON request per input line, one JSON response per output line. A
/// line holding an array is scored as a batch and answered with an array.
/// Blank lines are skipped; a malformed line yields an error with a null id.
/// Returns the number of lines answered. Flushes the snapshot at EOF.
std::size_t serve_stdio(RewardService& service, std::istream& in, std::ostream& out);

/// JSON-over-HTTP front end:
///   POST /score          array of requests, or {"requests": [...]}; array reply
///   POST /memory/insert  {trace|rollout, db_id, schema_columns?}
///   GET  /memory/stats
///   GET  /healthz        {"status":"ok","bank_size":N}
class HttpServer {
 public:
  explicit HttpServer(RewardService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds `port` (0 picks a free one) and returns the bound port. Throws DataError.
  int bind(const std::string& host, int port);
  /// Blocks until stop(); then flushes the memory snapshot.
  void run();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Binds, installs SIGINT/SIGTERM handlers that stop the server, and blocks.
void serve_http(RewardService& service, const std::string& host, int port);

}  // namespace sqlreward::service
