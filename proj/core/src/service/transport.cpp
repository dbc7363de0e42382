#include "sqlreward/service/transport.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <string>
#include <thread>

#include <httplib.h>

#include "sqlreward/errors.hpp"

namespace sqlreward::service {

namespace {

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

json answer(RewardService& service, const json& request) {
  if (request.is_array()) {
    std::vector<json> reqs(request.begin(), request.end());
    return service.score_batch(reqs);
  }
  return service.score_json(request);
}

}  // namespace

std::size_t serve_stdio(RewardService& service, std::istream& in, std::ostream& out) {
  std::size_t answered = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    json reply;
    try {
      reply = answer(service, json::parse(line));
    } catch (const json::parse_error& e) {
      reply = error_object(json(), "MalformedJson", e.what());
    }
    out << reply.dump() << '\n' << std::flush;
    ++answered;
  }
  try {
    service.flush();
  } catch (const std::exception& e) {
    std::cerr << "snapshot flush failed: " << e.what() << '\n';
  }
  return answered;
}

struct HttpServer::Impl {
  RewardService& service;
  httplib::Server server;
  std::atomic<bool> bound{false};

  explicit Impl(RewardService& s) : service(s) {
    auto send = [](httplib::Response& res, const json& body, int status = 200) {
      res.status = status;
      res.set_content(body.dump(), "application/json");
    };
    server.Post("/score", [this, send](const httplib::Request& req, httplib::Response& res) {
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::parse_error& e) {
        return send(res, error_object(json(), "MalformedJson", e.what()), 400);
      }
      if (body.is_object() && body.contains("requests")) body = body["requests"];
      if (!body.is_array()) body = json::array({body});
      std::vector<json> reqs(body.begin(), body.end());
      send(res, service.score_batch(reqs));
    });
    server.Post("/memory/insert", [this, send](const httplib::Request& req, httplib::Response& res) {
      try {
        send(res, service.insert_memory(json::parse(req.body)));
      } catch (const json::parse_error& e) {
        send(res, error_object(json(), "MalformedJson", e.what()), 400);
      } catch (const Error& e) {
        send(res, error_object(json(), e.code(), e.what()), 400);
      }
    });
    server.Get("/memory/stats", [this, send](const httplib::Request&, httplib::Response& res) {
      send(res, service.memory_stats());
    });
    server.Get("/healthz", [this, send](const httplib::Request&, httplib::Response& res) {
      send(res, service.health());
    });
    server.set_exception_handler([send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string message = "unknown error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        message = e.what();
      } catch (...) {
      }
      send(res, error_object(json(), "InternalError", message), 500);
    });
  }
};

HttpServer::HttpServer(RewardService& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw DataError("cannot bind " + host + ":" + std::to_string(port));
  impl_->bound = true;
  return bound;
}

void HttpServer::run() {
  if (!impl_->bound) throw DataError("HttpServer::run called before bind");
  impl_->server.listen_after_bind();
  impl_->service.flush();
}

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

namespace {
std::atomic<bool> g_stop_requested{false};
extern "C" void on_signal(int) { g_stop_requested = true; }
}  // namespace

void serve_http(RewardService& service, const std::string& host, int port) {
  HttpServer server(service);
  const int bound = server.bind(host, port);
  std::cerr << "listening on " << host << ":" << bound << '\n';
  g_stop_requested = false;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::atomic<bool> done{false};
  // stop() is not async-signal-safe, so a watcher thread performs it. It
  // retries because a stop issued before listen starts is lost.
  std::thread watcher([&] {
    while (!done) {
      if (g_stop_requested) server.stop();
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
  });
  server.run();
  done = true;
  watcher.join();
  std::signal(SIGINT, SIG_DFL);
  std::signal(SIGTERM, SIG_DFL);
}

}  // namespace sqlreward::service
