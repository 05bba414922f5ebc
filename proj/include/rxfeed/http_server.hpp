#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <thread>

#include "rxfeed/service.hpp"

namespace httplib {
class Server;
}

namespace rxfeed {

/// HTTP/JSON + server-sent-events front end for a SessionService.
///
///   POST   /sessions                      -> 201 {"session_id","presenter_token"}
///   POST   /sessions/{id}/join            -> 200 {"participant_token","alias"}
///   POST   /sessions/{id}/reactions       -> 200 {"verdict","cooldown_remaining_ms","count_in_window"}
///   GET    /sessions/{id}/stream          -> text/event-stream (Bearer presenter token)
///   GET    /sessions/{id}/analytics       -> analytics snapshot (Bearer presenter token)
///   DELETE /sessions/{id}                 -> 200 session record (Bearer presenter token)
///
/// Errors are JSON {"error": code, "message": text} with 400/403/404/410/503.
class HttpServer {
 public:
  explicit HttpServer(SessionService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds and serves on a background thread. Port 0 picks a free port.
  /// Returns the bound port; throws Error(Io) if binding fails.
  int start(const std::string& host, int port);
  /// Blocks serving on the calling thread until stop() is called elsewhere.
  void run(const std::string& host, int port);
  void stop();

  int port() const noexcept { return port_; }

 private:
  void install_routes();

  SessionService& service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::atomic<bool> stopping_{false};
  int port_ = 0;
};

/// HTTP status used for an error code.
int http_status_for(ErrorCode code) noexcept;

}  // namespace rxfeed
