#include <atomic>
#include <cstdlib>
#include <cstring>
#include <random>
#include <thread>

#include "rxfeed/borda.hpp"
#include "rxfeed/http_server.hpp"
#include "rxfeed/rxfeed.h"
#include "rxfeed/service.hpp"
#include "rxfeed/sim.hpp"

using nlohmann::json;
using namespace rxfeed;

struct rxf_service {
  std::shared_ptr<ManualClock> manual;
  std::unique_ptr<SessionService> service;
};

struct rxf_stream {
  std::unique_ptr<Subscription> sub;
};

struct rxf_server {
  std::unique_ptr<HttpServer> server;
};

namespace {

thread_local std::string g_last_error;
std::atomic<bool> g_interrupt{false};

rxf_status status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return RXF_ERR_INVALID_ARGUMENT;
    case ErrorCode::InvalidBallot: return RXF_ERR_INVALID_BALLOT;
    case ErrorCode::SessionNotFound: return RXF_ERR_SESSION_NOT_FOUND;
    case ErrorCode::SessionEnded: return RXF_ERR_SESSION_ENDED;
    case ErrorCode::Unauthorized: return RXF_ERR_UNAUTHORIZED;
    case ErrorCode::ServiceUnavailable: return RXF_ERR_SERVICE_UNAVAILABLE;
    case ErrorCode::Io: return RXF_ERR_IO;
    case ErrorCode::Parse: return RXF_ERR_PARSE;
    case ErrorCode::Connection: return RXF_ERR_CONNECTION;
    case ErrorCode::Aborted: return RXF_ERR_ABORTED;
  }
  return RXF_ERR_INTERNAL;
}

rxf_status fail(rxf_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename Fn>
rxf_status guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return RXF_OK;
  } catch (const Error& e) {
    return fail(status_for(e.code()), e.what());
  } catch (const json::exception& e) {
    return fail(RXF_ERR_PARSE, e.what());
  } catch (const std::exception& e) {
    return fail(RXF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RXF_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put(char** out, const json& j) { *out = dup_string(j.dump()); }

void need(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::InvalidArgument, std::string(what) + " is null");
}

SessionId session_arg(const char* text) {
  need(text, "session_id");
  auto id = SessionId::parse(text);
  if (!id) throw Error(ErrorCode::SessionNotFound, std::string("no session ") + text);
  return *id;
}

rxf_service* make_service(ServiceConfig cfg, bool manual_clock) {
  auto handle = std::make_unique<rxf_service>();
  std::shared_ptr<const Clock> clock;
  if (manual_clock) {
    handle->manual = std::make_shared<ManualClock>(0);
    clock = handle->manual;
  }
  handle->service = std::make_unique<SessionService>(std::move(cfg), clock);
  return handle.release();
}

json submit_json(const SubmitResult& r) {
  return {{"verdict", to_string(r.verdict.kind)},
          {"cooldown_remaining_ms", r.cooldown_remaining_ms},
          {"count_in_window", r.event ? json(r.event->count) : json(nullptr)}};
}

class CallbackResponder final : public QuizResponder {
 public:
  CallbackResponder(rxf_quiz_train_fn train, rxf_quiz_identify_fn identify, void* user)
      : train_(train), identify_(identify), user_(user) {}

  void train(ReactionType kind, const HapticSequence& seq) override {
    if (train_) train_(user_, static_cast<int>(index_of(kind)), json(seq).dump().c_str());
  }

  std::optional<ReactionType> identify(const HapticSequence& seq, int trial) override {
    int answer = -1;
    if (identify_(user_, json(seq).dump().c_str(), trial, &answer) != 0) return std::nullopt;
    if (answer < 0 || answer >= static_cast<int>(kReactionTypes.size())) return std::nullopt;
    return kReactionTypes[static_cast<std::size_t>(answer)];
  }

 private:
  rxf_quiz_train_fn train_;
  rxf_quiz_identify_fn identify_;
  void* user_;
};

}  // namespace

extern "C" {

const char* rxf_version(void) { return "0.3.0"; }

const char* rxf_last_error(void) { return g_last_error.c_str(); }

const char* rxf_status_name(rxf_status status) {
  switch (status) {
    case RXF_OK: return "ok";
    case RXF_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case RXF_ERR_INVALID_BALLOT: return "invalid_ballot";
    case RXF_ERR_SESSION_NOT_FOUND: return "session_not_found";
    case RXF_ERR_SESSION_ENDED: return "session_ended";
    case RXF_ERR_UNAUTHORIZED: return "unauthorized";
    case RXF_ERR_SERVICE_UNAVAILABLE: return "service_unavailable";
    case RXF_ERR_IO: return "io";
    case RXF_ERR_PARSE: return "parse";
    case RXF_ERR_CONNECTION: return "connection";
    case RXF_ERR_ABORTED: return "aborted";
    case RXF_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void rxf_string_free(char* s) { std::free(s); }

rxf_status rxf_service_create(const char* config_toml, int manual_clock, rxf_service** out) {
  return guard([&] {
    need(out, "out");
    ServiceConfig cfg = config_toml ? parse_service_config(config_toml) : ServiceConfig{};
    cfg.validate();
    *out = make_service(std::move(cfg), manual_clock != 0);
  });
}

rxf_status rxf_service_create_from_env(const char* config_path, rxf_service** out) {
  return guard([&] {
    need(out, "out");
    std::optional<std::filesystem::path> file;
    if (config_path && *config_path) file = config_path;
    auto cfg = load_service_config(file, [](const char* name) { return std::getenv(name); });
    *out = make_service(std::move(cfg), false);
  });
}

void rxf_service_destroy(rxf_service* service) { delete service; }

rxf_status rxf_service_config(const rxf_service* service, char** out_json) {
  return guard([&] {
    need(service, "service");
    need(out_json, "out_json");
    const auto& cfg = service->service->config();
    auto j = session_config_json(cfg);
    j["data_dir"] = cfg.data_dir;
    j["bind"] = cfg.bind;
    j["port"] = cfg.port;
    j["keepalive_ms"] = cfg.keepalive_ms;
    j["subscriber_buffer"] = cfg.subscriber_buffer;
    j["id_retries"] = cfg.id_retries;
    j["join_throttle_per_min"] = cfg.join_throttle_per_min;
    put(out_json, j);
  });
}

rxf_status rxf_service_set_time(rxf_service* service, int64_t now_ms) {
  return guard([&] {
    need(service, "service");
    if (!service->manual) throw Error(ErrorCode::InvalidArgument, "service does not use a manual clock");
    service->manual->set(now_ms);
  });
}

rxf_status rxf_service_now(const rxf_service* service, int64_t* out_ms) {
  return guard([&] {
    need(service, "service");
    need(out_ms, "out_ms");
    *out_ms = service->service->clock().now();
  });
}

rxf_status rxf_session_create(rxf_service* service, char** out_json) {
  return guard([&] {
    need(service, "service");
    need(out_json, "out_json");
    auto created = service->service->create_session();
    put(out_json, {{"session_id", created.id.str()}, {"presenter_token", created.presenter_token}});
  });
}

rxf_status rxf_session_join(rxf_service* service, const char* session_id, char** out_json) {
  return guard([&] {
    need(service, "service");
    need(out_json, "out_json");
    auto joined = service->service->join_session(session_arg(session_id));
    put(out_json, {{"participant_token", joined.participant_token}, {"alias", joined.alias}});
  });
}

rxf_status rxf_session_submit(rxf_service* service, const char* session_id, const char* participant_token,
                              const char* kind, char** out_json) {
  return guard([&] {
    need(service, "service");
    need(participant_token, "participant_token");
    need(kind, "kind");
    need(out_json, "out_json");
    auto r = service->service->submit_reaction(session_arg(session_id), participant_token,
                                               reaction_type_from_string(kind));
    put(out_json, submit_json(r));
  });
}

rxf_status rxf_session_end(rxf_service* service, const char* session_id, const char* presenter_token,
                           char** out_json) {
  return guard([&] {
    need(service, "service");
    need(presenter_token, "presenter_token");
    need(out_json, "out_json");
    put(out_json, to_json(service->service->end_session(session_arg(session_id), presenter_token)));
  });
}

rxf_status rxf_session_analytics(rxf_service* service, const char* session_id, const char* presenter_token,
                                 char** out_json) {
  return guard([&] {
    need(service, "service");
    need(presenter_token, "presenter_token");
    need(out_json, "out_json");
    put(out_json, json(service->service->analytics(session_arg(session_id), presenter_token)));
  });
}

rxf_status rxf_stream_open(rxf_service* service, const char* session_id, const char* presenter_token,
                           const char* role, uint64_t last_seq, rxf_stream** out) {
  return guard([&] {
    need(service, "service");
    need(presenter_token, "presenter_token");
    need(out, "out");
    auto parsed = parse_stream_role(role ? role : "presenter");
    if (!parsed) throw Error(ErrorCode::InvalidArgument, "role must be presenter or researcher");
    auto sub = service->service->open_stream(session_arg(session_id), presenter_token, *parsed, last_seq);
    *out = new rxf_stream{std::move(sub)};
  });
}

rxf_status rxf_stream_next(rxf_stream* stream, int32_t timeout_ms, char** out_json) {
  return guard([&] {
    need(stream, "stream");
    need(out_json, "out_json");
    auto item = stream->sub->next(std::chrono::milliseconds(std::max<int32_t>(0, timeout_ms)));
    switch (item.status) {
      case Subscription::Status::Event:
        put(out_json, {{"status", "event"},
                       {"seq", item.event.seq},
                       {"type", item.event.type},
                       {"data", item.event.data}});
        break;
      case Subscription::Status::Heartbeat: put(out_json, {{"status", "heartbeat"}}); break;
      case Subscription::Status::Closed: put(out_json, {{"status", "closed"}}); break;
      case Subscription::Status::Disconnected: put(out_json, {{"status", "disconnected"}}); break;
    }
  });
}

void rxf_stream_close(rxf_stream* stream) { delete stream; }

rxf_status rxf_server_start(rxf_service* service, const char* host, int32_t port, rxf_server** out) {
  return guard([&] {
    need(service, "service");
    need(out, "out");
    auto handle = std::make_unique<rxf_server>();
    handle->server = std::make_unique<HttpServer>(*service->service);
    handle->server->start(host ? host : "127.0.0.1", port);
    *out = handle.release();
  });
}

int32_t rxf_server_port(const rxf_server* server) { return server ? server->server->port() : -1; }

void rxf_server_stop(rxf_server* server) { delete server; }

rxf_status rxf_server_run(rxf_service* service, const char* host, int32_t port) {
  return guard([&] {
    need(service, "service");
    g_interrupt = false;
    HttpServer server(*service->service);
    server.start(host ? host : "127.0.0.1", port);
    // Polling a lock-free flag keeps rxf_server_interrupt() safe to call from a signal handler.
    while (!g_interrupt) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
  });
}

void rxf_server_interrupt(void) { g_interrupt = true; }

rxf_status rxf_haptic_json(const char* kind, uint32_t count, int scaling_enabled, char** out_json) {
  return guard([&] {
    need(kind, "kind");
    need(out_json, "out_json");
    IntensityScaling scaling;
    scaling.enabled = scaling_enabled != 0;
    auto seq = haptic_sequence_for(reaction_type_from_string(kind));
    if (count == 0) throw Error(ErrorCode::InvalidArgument, "count must be >= 1");
    put(out_json, json(scaling.enabled ? scale_sequence(seq, count, scaling) : seq));
  });
}

rxf_status rxf_borda_json(const char* input_json, char** out_json) {
  return guard([&] {
    need(input_json, "input_json");
    need(out_json, "out_json");
    const auto input = json::parse(input_json);
    const auto ballots = input.at("ballots").get<std::vector<BordaBallot>>();
    const auto weights = input.contains("weights") ? input["weights"].get<std::vector<std::int64_t>>()
                                                   : kDefaultBordaWeights;
    put(out_json, json(borda_count(ballots, weights)));
  });
}

rxf_status rxf_generate_session_id(uint64_t seed, char out[7]) {
  return guard([&] {
    need(out, "out");
    std::mt19937_64 rng(seed);
    const auto id = generate_session_id(rng).str();
    std::memcpy(out, id.c_str(), id.size() + 1);
  });
}

rxf_status rxf_record_analytics(const char* path, char** out_json) {
  return guard([&] {
    need(path, "path");
    need(out_json, "out_json");
    put(out_json, json(load_record_file(path).analytics()));
  });
}

rxf_status rxf_sim_preset_names(char** out_json) {
  return guard([&] {
    need(out_json, "out_json");
    put(out_json, json(preset_names()));
  });
}

rxf_status rxf_sim_preset_toml(const char* name, char** out_toml) {
  return guard([&] {
    need(name, "name");
    need(out_toml, "out_toml");
    *out_toml = dup_string(preset_scenario_toml(name));
  });
}

rxf_status rxf_sim_run(const char* scenario_toml, const char* mode, const char* base_url, int has_seed,
                       uint64_t seed, char** out_json) {
  return guard([&] {
    need(scenario_toml, "scenario_toml");
    need(out_json, "out_json");
    auto scenario = parse_scenario(scenario_toml);
    if (has_seed) scenario.seed = seed;
    SimOptions options;
    const std::string m = mode ? mode : "inprocess";
    if (m == "http") {
      options.mode = SimMode::Http;
      options.base_url = base_url ? base_url : "";
    } else if (m != "inprocess") {
      throw Error(ErrorCode::InvalidArgument, "mode must be inprocess or http");
    }
    put(out_json, run_scenario(scenario, options));
  });
}

rxf_status rxf_quiz_run(uint64_t seed, const char* responder_toml, rxf_quiz_train_fn train,
                        rxf_quiz_identify_fn identify, void* user, char** out_json) {
  if (out_json) *out_json = nullptr;
  rxf_status aborted = RXF_OK;
  std::string abort_message;
  auto st = guard([&] {
    need(out_json, "out_json");
    std::unique_ptr<QuizResponder> responder;
    if (responder_toml) {
      responder = responder_from_toml(responder_toml);
    } else {
      if (!identify) throw Error(ErrorCode::InvalidArgument, "identify callback is null");
      responder = std::make_unique<CallbackResponder>(train, identify, user);
    }
    try {
      put(out_json, json(run_haptics_quiz(*responder, seed)));
    } catch (const QuizAborted& e) {
      put(out_json, json(e.partial()));
      abort_message = e.what();
      aborted = RXF_ERR_ABORTED;
    }
  });
  if (st == RXF_OK && aborted != RXF_OK) return fail(aborted, abort_message);
  return st;
}

}  // extern "C"
