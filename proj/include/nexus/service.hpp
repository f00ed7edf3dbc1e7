#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "nexus/charact.hpp"
#include "nexus/expansion.hpp"

namespace nexus {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 7878;
  std::size_t candidate_cap = kDefaultCandidateCap;
  std::size_t product_cap = kDefaultProductCap;

  // NEXUS_PORT, NEXUS_CAP_TUPLES, NEXUS_CAP_PRODUCT override the defaults.
  static ServiceConfig from_env();
};

struct HttpReply {
  int status = 200;
  std::string body;  // JSON
};

// JSON-over-HTTP facade with named sessions. `handle` is the whole routing
// table, so tests can drive it without a socket.
//
//   POST /sessions                     {facts, rules, selector, summaries?}
//   GET  /sessions/{id}
//   POST /sessions/{id}/can|core       {unit}
//   POST /sessions/{id}/ess            {unit, tuple?}
//   POST /sessions/{id}/explains       {unit, formula}
//   POST /sessions/{id}/compare        {unit, tau, tau_prime}
//   POST /sessions/{id}/graph          {unit, cap?, async?}
//   POST /sessions/{id}/neighbors      {unit, node?, cap?}
//   GET  /sessions/{id}/jobs/{job}
//
// Units are arrays of arrays of constant names or "a,b;c,d" strings.
// Errors carry {code, message, detail}.
class Service {
 public:
  explicit Service(ServiceConfig config = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  HttpReply handle(std::string_view method, std::string_view path, std::string_view body);

  // Blocks until stop(). Returns false when the socket cannot be bound.
  bool listen();
  // Binds to config.host on an ephemeral port when config.port == 0 and
  // serves on a background thread; returns the bound port or -1.
  int start_background();
  void stop();

  const ServiceConfig& config() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace nexus
