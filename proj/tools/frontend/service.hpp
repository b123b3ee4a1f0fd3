#pragma once

#include <memory>
#include <ostream>
#include <string>

namespace hybridctl::frontend {

struct ServiceOptions {
  std::string bind = "127.0.0.1";
  int port = 8080;
  int workers = 1;  // per-job worker hint
};

/// Defaults overridden by HYBRIDCTL_BIND, HYBRIDCTL_PORT and HYBRIDCTL_WORKERS.
ServiceOptions options_from_env();

/// HTTP/JSON service. Simulation jobs run one at a time in submission order
/// on a background thread; analysis requests are answered inline.
class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds the listening socket; port 0 picks a free port. Returns the port
  /// or -1 on failure.
  int bind();

  /// Serves until stop() is called.
  void listen();

  /// Stops accepting requests, cancels the running job and drops the queue.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// bind + listen, stopping cleanly on SIGINT or SIGTERM. Returns an exit code.
int serve_until_signal(const ServiceOptions& options, std::ostream& log);

}  // namespace hybridctl::frontend
