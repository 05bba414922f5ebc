#include "rxfeed/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "tomlplusplus/toml.hpp"

namespace rxfeed {

void ServiceConfig::validate() const {
  aggregation.validate();
  moderation.validate();
  analytics.validate();
  if (port < 0 || port > 65535) throw Error(ErrorCode::InvalidArgument, "port out of range");
  if (keepalive_ms <= 0) throw Error(ErrorCode::InvalidArgument, "keepalive_ms must be > 0");
  if (subscriber_buffer == 0) throw Error(ErrorCode::InvalidArgument, "subscriber_buffer must be > 0");
  if (id_retries < 1) throw Error(ErrorCode::InvalidArgument, "id_retries must be >= 1");
  if (join_throttle_per_min < 0) throw Error(ErrorCode::InvalidArgument, "join_throttle_per_min must be >= 0");
}

namespace {

// One setter per key; the value arrives as text so TOML and env share parsing.
struct Setter {
  const char* key;
  std::function<void(ServiceConfig&, const std::string&)> set;
};

std::int64_t to_int(const std::string& key, const std::string& text) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::Parse, "config: '" + key + "' expects an integer, got '" + text + "'");
  }
  return v;
}

double to_real(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::Parse, "config: '" + key + "' expects a number, got '" + text + "'");
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw Error(ErrorCode::Parse, "config: '" + key + "' expects a boolean, got '" + text + "'");
}

const std::vector<Setter>& setters() {
  static const std::vector<Setter> table = {
      {"window_len_ms", [](auto& c, auto& v) { c.aggregation.window_len = to_int("window_len_ms", v); }},
      {"cooldown_ms", [](auto& c, auto& v) { c.moderation.cooldown = to_int("cooldown_ms", v); }},
      {"rate_limit", [](auto& c, auto& v) { c.moderation.rate_limit = static_cast<int>(to_int("rate_limit", v)); }},
      {"rate_window_ms", [](auto& c, auto& v) { c.moderation.rate_window = to_int("rate_window_ms", v); }},
      {"session_cap",
       [](auto& c, auto& v) {
         if (v == "none" || v.empty()) {
           c.moderation.session_cap.reset();
         } else {
           c.moderation.session_cap = static_cast<int>(to_int("session_cap", v));
         }
       }},
      {"escalation",
       [](auto& c, auto& v) {
         auto e = parse_escalation(v);
         if (!e) throw Error(ErrorCode::Parse, "config: escalation must be \"off\" or \"warn_then_ban\"");
         c.moderation.escalation = *e;
       }},
      {"bind", [](auto& c, auto& v) { c.bind = v; }},
      {"port", [](auto& c, auto& v) { c.port = static_cast<int>(to_int("port", v)); }},
      {"data_dir", [](auto& c, auto& v) { c.data_dir = v; }},
      {"keepalive_ms", [](auto& c, auto& v) { c.keepalive_ms = to_int("keepalive_ms", v); }},
      {"subscriber_buffer",
       [](auto& c, auto& v) { c.subscriber_buffer = static_cast<std::size_t>(to_int("subscriber_buffer", v)); }},
      {"id_retries", [](auto& c, auto& v) { c.id_retries = static_cast<int>(to_int("id_retries", v)); }},
      {"join_throttle_per_min",
       [](auto& c, auto& v) { c.join_throttle_per_min = static_cast<int>(to_int("join_throttle_per_min", v)); }},
      {"timeline_bin_ms", [](auto& c, auto& v) { c.analytics.bin_width = to_int("timeline_bin_ms", v); }},
      {"dominance_threshold",
       [](auto& c, auto& v) { c.analytics.dominance_threshold = to_real("dominance_threshold", v); }},
      {"log_limit", [](auto& c, auto& v) { c.analytics.log_limit = static_cast<std::size_t>(to_int("log_limit", v)); }},
      {"haptic_scaling", [](auto& c, auto& v) { c.aggregation.scaling.enabled = to_bool("haptic_scaling", v); }},
      {"haptic_scaling_base", [](auto& c, auto& v) { c.aggregation.scaling.base = to_real("haptic_scaling_base", v); }},
      {"haptic_scaling_slope",
       [](auto& c, auto& v) { c.aggregation.scaling.slope = to_real("haptic_scaling_slope", v); }},
      {"seed", [](auto& c, auto& v) { c.seed = static_cast<std::uint64_t>(to_int("seed", v)); }},
  };
  return table;
}

const Setter* find_setter(std::string_view key) {
  for (const auto& s : setters()) {
    if (key == s.key) return &s;
  }
  return nullptr;
}

std::string node_text(const toml::node& node) {
  if (auto s = node.value<std::string>(); s && node.is_string()) return *s;
  if (node.is_integer()) return std::to_string(*node.value<std::int64_t>());
  if (node.is_floating_point()) {
    std::ostringstream os;
    os.precision(17);
    os << *node.value<double>();
    return os.str();
  }
  if (node.is_boolean()) return *node.value<bool>() ? "true" : "false";
  throw Error(ErrorCode::Parse, "config: values must be strings, numbers or booleans");
}

}  // namespace

ServiceConfig parse_service_config(std::string_view toml_text, ServiceConfig base) {
  toml::table table;
  try {
    table = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    throw Error(ErrorCode::Parse, std::string("config: ") + std::string(e.description()));
  }
  for (const auto& [key, node] : table) {
    const auto* setter = find_setter(key.str());
    if (!setter) throw Error(ErrorCode::Parse, "config: unknown key '" + std::string(key.str()) + "'");
    setter->set(base, node_text(node));
  }
  return base;
}

void apply_env_overrides(ServiceConfig& config, const EnvLookup& lookup) {
  for (const auto& s : setters()) {
    std::string name = "RXFEED_";
    for (const char* p = s.key; *p; ++p) name += static_cast<char>(std::toupper(static_cast<unsigned char>(*p)));
    if (const char* value = lookup(name.c_str())) s.set(config, value);
  }
}

ServiceConfig load_service_config(const std::optional<std::filesystem::path>& file,
                                  const EnvLookup& lookup) {
  ServiceConfig config;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw Error(ErrorCode::Io, "cannot read config " + file->string());
    std::stringstream buf;
    buf << in.rdbuf();
    config = parse_service_config(buf.str(), config);
  }
  apply_env_overrides(config, lookup);
  config.validate();
  return config;
}

nlohmann::json session_config_json(const ServiceConfig& config) {
  nlohmann::json j = config.moderation;
  j["window_len_ms"] = config.aggregation.window_len;
  j["timeline_bin_ms"] = config.analytics.bin_width;
  j["dominance_threshold"] = config.analytics.dominance_threshold;
  j["log_limit"] = config.analytics.log_limit;
  return j;
}

}  // namespace rxfeed
