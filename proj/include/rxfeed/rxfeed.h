/* C interface to the rxfeed library.
 *
 * Every call returns an rxf_status. On failure rxf_last_error() gives a
 * message for the calling thread. Strings returned through char** are
 * heap-allocated, NUL-terminated UTF-8 and must be released with
 * rxf_string_free(). Handles are opaque and not shared between threads
 * unless noted.
 */
#ifndef RXFEED_H
#define RXFEED_H

#include <stdint.h>

#if defined(_WIN32)
#define RXF_API __declspec(dllexport)
#else
#define RXF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rxf_status {
  RXF_OK = 0,
  RXF_ERR_INVALID_ARGUMENT = 1,
  RXF_ERR_INVALID_BALLOT = 2,
  RXF_ERR_SESSION_NOT_FOUND = 3,
  RXF_ERR_SESSION_ENDED = 4,
  RXF_ERR_UNAUTHORIZED = 5,
  RXF_ERR_SERVICE_UNAVAILABLE = 6,
  RXF_ERR_IO = 7,
  RXF_ERR_PARSE = 8,
  RXF_ERR_CONNECTION = 9,
  RXF_ERR_ABORTED = 10,
  RXF_ERR_INTERNAL = 99
} rxf_status;

/* Reaction kinds, in dashboard order. */
enum { RXF_HAND_RAISE = 0, RXF_CONFUSED = 1, RXF_CONFIDENT = 2 };

typedef struct rxf_service rxf_service;
typedef struct rxf_stream rxf_stream;
typedef struct rxf_server rxf_server;

RXF_API const char* rxf_version(void);
RXF_API const char* rxf_last_error(void);
RXF_API const char* rxf_status_name(rxf_status status);
RXF_API void rxf_string_free(char* s);

/* ---- service ---- */

/* config_toml may be NULL for defaults. With manual_clock != 0 time only
 * moves through rxf_service_set_time(), starting at 0. */
RXF_API rxf_status rxf_service_create(const char* config_toml, int manual_clock, rxf_service** out);
/* Reads the optional TOML file, then RXFEED_* environment overrides. */
RXF_API rxf_status rxf_service_create_from_env(const char* config_path, rxf_service** out);
RXF_API void rxf_service_destroy(rxf_service* service);
/* The effective configuration as JSON. */
RXF_API rxf_status rxf_service_config(const rxf_service* service, char** out_json);
RXF_API rxf_status rxf_service_set_time(rxf_service* service, int64_t now_ms);
RXF_API rxf_status rxf_service_now(const rxf_service* service, int64_t* out_ms);

/* {"session_id","presenter_token"} */
RXF_API rxf_status rxf_session_create(rxf_service* service, char** out_json);
/* {"participant_token","alias"} */
RXF_API rxf_status rxf_session_join(rxf_service* service, const char* session_id, char** out_json);
/* kind is "HandRaise", "Confused" or "Confident".
 * {"verdict","cooldown_remaining_ms","count_in_window"} */
RXF_API rxf_status rxf_session_submit(rxf_service* service, const char* session_id, const char* participant_token,
                                      const char* kind, char** out_json);
/* Session record JSON. Idempotent. */
RXF_API rxf_status rxf_session_end(rxf_service* service, const char* session_id, const char* presenter_token,
                                   char** out_json);
RXF_API rxf_status rxf_session_analytics(rxf_service* service, const char* session_id,
                                         const char* presenter_token, char** out_json);

/* ---- event streams ---- */

/* role is "presenter" or "researcher". Events with seq > last_seq are replayed. */
RXF_API rxf_status rxf_stream_open(rxf_service* service, const char* session_id, const char* presenter_token,
                                   const char* role, uint64_t last_seq, rxf_stream** out);
/* Waits up to timeout_ms. Writes {"status":"event","seq","type","data"} or
 * {"status":"heartbeat"|"closed"|"disconnected"}. */
RXF_API rxf_status rxf_stream_next(rxf_stream* stream, int32_t timeout_ms, char** out_json);
RXF_API void rxf_stream_close(rxf_stream* stream);

/* ---- HTTP server ---- */

/* Serves on a background thread; port 0 picks a free port. */
RXF_API rxf_status rxf_server_start(rxf_service* service, const char* host, int32_t port, rxf_server** out);
RXF_API int32_t rxf_server_port(const rxf_server* server);
/* Stops serving and releases the handle. */
RXF_API void rxf_server_stop(rxf_server* server);
/* Blocks until rxf_server_interrupt() is called from another thread or a signal handler. */
RXF_API rxf_status rxf_server_run(rxf_service* service, const char* host, int32_t port);
RXF_API void rxf_server_interrupt(void);

/* ---- building blocks ---- */

/* Haptic descriptor for a reaction kind after intensity scaling for count
 * (scaling applies only when scaling_enabled != 0, with defaults). */
RXF_API rxf_status rxf_haptic_json(const char* kind, uint32_t count, int scaling_enabled, char** out_json);
/* Input {"ballots":[{"voter","ranking":[...]}], "weights":[...]?}. */
RXF_API rxf_status rxf_borda_json(const char* input_json, char** out_json);
/* Six characters from A-Z0-9 plus NUL. */
RXF_API rxf_status rxf_generate_session_id(uint64_t seed, char out[7]);
/* Recomputes analytics from a persisted session file. */
RXF_API rxf_status rxf_record_analytics(const char* path, char** out_json);

/* ---- simulation ---- */

/* JSON array of preset names. */
RXF_API rxf_status rxf_sim_preset_names(char** out_json);
RXF_API rxf_status rxf_sim_preset_toml(const char* name, char** out_toml);
/* mode is "inprocess" or "http" (base_url required). has_seed != 0 overrides the scenario seed. */
RXF_API rxf_status rxf_sim_run(const char* scenario_toml, const char* mode, const char* base_url, int has_seed,
                               uint64_t seed, char** out_json);

/* Quiz responder callbacks. identify writes the answered kind to *out_kind and
 * returns 0, or returns nonzero to abort. train may be NULL. */
typedef void (*rxf_quiz_train_fn)(void* user, int kind, const char* haptic_json);
typedef int (*rxf_quiz_identify_fn)(void* user, const char* haptic_json, int trial, int* out_kind);

/* Runs the haptics quiz with either a scripted responder (responder_toml) or
 * the callbacks (responder_toml NULL). On abort returns RXF_ERR_ABORTED and
 * still writes the partial result. */
RXF_API rxf_status rxf_quiz_run(uint64_t seed, const char* responder_toml, rxf_quiz_train_fn train,
                                rxf_quiz_identify_fn identify, void* user, char** out_json);

#ifdef __cplusplus
}
#endif

#endif
