#include <iostream>

#include "common.hpp"
#include "sqlreward/service/transport.hpp"

namespace sqlreward::cli {

namespace {

struct ServeArgs {
  bool http = false;
  std::optional<std::string> host;
  std::optional<int> port;
  std::optional<std::string> pools;
  std::optional<std::string> bank;
};

void run_serve(const ServeArgs& a, const Common& common) {
  auto cfg = common.load();
  if (a.pools) cfg.pools = *a.pools;
  if (a.bank) cfg.bank = *a.bank;
  if (a.host) cfg.host = *a.host;
  if (a.port) cfg.port = static_cast<std::uint16_t>(*a.port);
  service::RewardService service(cfg);
  std::cerr << "bank_size=" << service.bank().size() << " pools=" << service.pool_count() << '\n';
  if (a.http) {
    service::serve_http(service, cfg.host, cfg.port);
  } else {
    std::ios::sync_with_stdio(false);
    service::serve_stdio(service, std::cin, std::cout);
  }
}

}  // namespace

void register_serve_command(CLI::App& app, Common& common) {
  auto a = std::make_shared<ServeArgs>();
  auto* sv = app.add_subcommand("serve", "Batch reward service over stdio lines (default) or HTTP");
  auto* stdio = sv->add_flag("--stdio", "Read one JSON request per line from stdin (default)");
  sv->add_flag("--http", a->http, "Serve JSON over HTTP")->excludes(stdio);
  sv->add_option("--host", a->host, "HTTP bind address");
  sv->add_option("--port", a->port, "HTTP port (0 picks a free one)")->check(CLI::Range(0, 65535));
  sv->add_option("--db-root", common.db_root, "Database root directory");
  sv->add_option("--pools", a->pools, "Reference pools (JSONL)");
  sv->add_option("--bank", a->bank, "Memory snapshot, flushed at shutdown");
  sv->add_option("--preset", common.preset, "Default shaping preset");
  sv->add_option("--threads", common.threads, "Batch workers (0 = all cores)");
  sv->callback([a, &common] { run_serve(*a, common); });
}

}  // namespace sqlreward::cli
