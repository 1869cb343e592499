#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "simbench/config.hpp"

namespace simbench {

struct ServeOptions {
  std::string out_dir;  // where scope history is flushed on shutdown; empty: none
};

/// Realtime bench served over the line protocol.
///
/// One thread owns the Simulation and steps it against the wall clock. A
/// second thread runs all sockets: the raw stream port and the HTTP gateway
/// (static dashboard files plus the same protocol as WebSocket text at /ws).
/// Commands reach the stepping thread through one ordered queue; each client
/// reads its next line only after the previous reply has been queued for
/// writing. Telemetry frames are shared by all streaming clients and are
/// dropped for a client whose outbound queue is full.
class BenchServer {
 public:
  explicit BenchServer(SimConfig cfg, ServeOptions opts = {});
  ~BenchServer();

  BenchServer(const BenchServer&) = delete;
  BenchServer& operator=(const BenchServer&) = delete;

  /// Binds both ports and starts the threads. Throws PortInUse.
  void start();
  /// Stops the threads and flushes scope history. Idempotent.
  void stop();

  /// Bound ports (useful when the config asked for port 0).
  std::uint16_t tcp_port() const;
  std::uint16_t http_port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Runs until SIGINT/SIGTERM. Returns a process exit code.
int serve(const SimConfig& cfg, const ServeOptions& opts);

}  // namespace simbench
