#include "rxfeed/http_server.hpp"

#include "httplib.h"

namespace rxfeed {

using nlohmann::json;

int http_status_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidBallot:
    case ErrorCode::Parse: return 400;
    case ErrorCode::Unauthorized: return 403;
    case ErrorCode::SessionNotFound: return 404;
    case ErrorCode::SessionEnded: return 410;
    case ErrorCode::ServiceUnavailable: return 503;
    case ErrorCode::Io:
    case ErrorCode::Connection:
    case ErrorCode::Aborted: return 500;
  }
  return 500;
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
  send_json(res, http_status_for(e.code()), {{"error", to_string(e.code())}, {"message", e.what()}});
}

SessionId path_session(const httplib::Request& req) {
  const auto& raw = req.path_params.at("id");
  auto id = SessionId::parse(raw);
  // A malformed ID cannot name a session.
  if (!id) throw Error(ErrorCode::SessionNotFound, "no session " + raw);
  return *id;
}

std::string bearer_token(const httplib::Request& req) {
  const auto header = req.get_header_value("Authorization");
  constexpr std::string_view prefix = "Bearer ";
  if (header.size() > prefix.size() && header.compare(0, prefix.size(), prefix) == 0) {
    return header.substr(prefix.size());
  }
  if (req.has_param("token")) return req.get_param_value("token");
  throw Error(ErrorCode::Unauthorized, "missing bearer token");
}

json parse_body(const httplib::Request& req) {
  auto body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) throw Error(ErrorCode::Parse, "request body must be a JSON object");
  return body;
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const json::exception& e) {
      send_error(res, Error(ErrorCode::Parse, e.what()));
    }
  };
}

}  // namespace

HttpServer::HttpServer(SessionService& service) : service_(service), server_(std::make_unique<httplib::Server>()) {
  // Each open event stream holds a worker for its lifetime.
  server_->new_task_queue = [] { return new httplib::ThreadPool(64); };
  install_routes();
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::install_routes() {
  auto& svr = *server_;

  svr.Post("/sessions", guarded([this](const httplib::Request&, httplib::Response& res) {
             auto created = service_.create_session();
             send_json(res, 201, {{"session_id", created.id.str()}, {"presenter_token", created.presenter_token}});
           }));

  svr.Post("/sessions/:id/join", guarded([this](const httplib::Request& req, httplib::Response& res) {
             auto joined = service_.join_session(path_session(req));
             send_json(res, 200, {{"participant_token", joined.participant_token}, {"alias", joined.alias}});
           }));

  svr.Post("/sessions/:id/reactions", guarded([this](const httplib::Request& req, httplib::Response& res) {
             const auto id = path_session(req);
             const auto body = parse_body(req);
             if (!body.contains("participant_token") || !body["participant_token"].is_string()) {
               throw Error(ErrorCode::Unauthorized, "participant_token missing");
             }
             if (!body.contains("kind") || !body["kind"].is_string()) {
               throw Error(ErrorCode::InvalidArgument, "kind missing");
             }
             const auto kind = reaction_type_from_string(body["kind"].get<std::string>());
             auto result = service_.submit_reaction(id, body["participant_token"].get<std::string>(), kind);
             json out = {{"verdict", to_string(result.verdict.kind)},
                         {"cooldown_remaining_ms", result.cooldown_remaining_ms},
                         {"count_in_window", result.event ? json(result.event->count) : json(nullptr)}};
             send_json(res, 200, out);
           }));

  svr.Get("/sessions/:id/analytics", guarded([this](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, service_.analytics(path_session(req), bearer_token(req)));
          }));

  svr.Delete("/sessions/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, to_json(service_.end_session(path_session(req), bearer_token(req))));
             }));

  svr.Get("/sessions/:id/stream", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto id = path_session(req);
            auto role = parse_stream_role(req.has_param("role") ? req.get_param_value("role") : "presenter");
            if (!role) throw Error(ErrorCode::InvalidArgument, "role must be presenter or researcher");
            std::uint64_t last_seq = 0;
            std::string resume = req.get_header_value("Last-Event-ID");
            if (req.has_param("last_seq")) resume = req.get_param_value("last_seq");
            if (!resume.empty()) {
              try {
                last_seq = std::stoull(resume);
              } catch (const std::exception&) {
                throw Error(ErrorCode::InvalidArgument, "last_seq must be a non-negative integer");
              }
            }
            std::shared_ptr<Subscription> sub = service_.open_stream(id, bearer_token(req), *role, last_seq);
            const auto keepalive = std::chrono::milliseconds(service_.config().keepalive_ms);

            res.set_header("Cache-Control", "no-cache");
            res.set_chunked_content_provider(
                "text/event-stream", [this, sub, keepalive](std::size_t, httplib::DataSink& sink) {
                  // Wake at least every 250 ms so shutdown is noticed promptly.
                  const auto slice = std::min(keepalive, std::chrono::milliseconds(250));
                  auto idle = std::chrono::milliseconds(0);
                  while (!stopping_) {
                    auto item = sub->next(slice);
                    switch (item.status) {
                      case Subscription::Status::Event: {
                        const auto text = format_sse(item.event);
                        if (!sink.write(text.data(), text.size())) return false;
                        if (item.event.type == "end") {
                          sink.done();
                          return true;
                        }
                        return true;
                      }
                      case Subscription::Status::Heartbeat:
                        idle += slice;
                        if (idle >= keepalive) {
                          idle = std::chrono::milliseconds(0);
                          if (!sink.write(kSseKeepalive.data(), kSseKeepalive.size())) return false;
                        }
                        break;
                      case Subscription::Status::Closed:
                        sink.done();
                        return true;
                      case Subscription::Status::Disconnected:
                        return false;
                    }
                  }
                  return false;
                });
          }));
}

int HttpServer::start(const std::string& host, int port) {
  port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ <= 0) throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void HttpServer::run(const std::string& host, int port) {
  port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ <= 0) throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
  server_->listen_after_bind();
}

void HttpServer::stop() {
  stopping_ = true;
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace rxfeed
