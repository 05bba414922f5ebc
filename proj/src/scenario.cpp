#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "rxfeed/sim.hpp"
#include "tomlplusplus/toml.hpp"

namespace rxfeed {

std::optional<ReactionType> prompt_reaction(std::string_view event) noexcept {
  if (event == "confusing_moment") return ReactionType::Confused;
  if (event == "question_call") return ReactionType::HandRaise;
  if (event == "checkpoint") return ReactionType::Confident;
  return parse_reaction_type(event);
}

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::Parse, "scenario: " + what); }

void check_keys(const toml::table& table, std::initializer_list<std::string_view> allowed, std::string_view where) {
  for (const auto& [key, _] : table) {
    if (std::find(allowed.begin(), allowed.end(), key.str()) == allowed.end()) {
      parse_fail("unknown key '" + std::string(key.str()) + "' in " + std::string(where));
    }
  }
}

template <typename T>
T required(const toml::table& table, std::string_view key) {
  auto v = table[key].value<T>();
  if (!v) parse_fail("missing or mistyped '" + std::string(key) + "'");
  return *v;
}

template <typename T>
T optional_value(const toml::table& table, std::string_view key, T fallback) {
  const auto* node = table.get(key);
  if (!node) return fallback;
  auto v = node->value<T>();
  if (!v) parse_fail("mistyped '" + std::string(key) + "'");
  return *v;
}

ReactionType reaction_or_fail(std::string_view name) {
  auto kind = parse_reaction_type(name);
  if (!kind) parse_fail("unknown reaction type '" + std::string(name) + "'");
  return *kind;
}

std::vector<ReactionType> reaction_list(const toml::array& arr, std::string_view key) {
  std::vector<ReactionType> out;
  for (const auto& node : arr) {
    auto name = node.value<std::string>();
    if (!name) parse_fail("'" + std::string(key) + "' must list strings");
    auto kind = prompt_reaction(*name);
    if (!kind) parse_fail("unknown entry '" + *name + "' in '" + std::string(key) + "'");
    out.push_back(*kind);
  }
  return out;
}

ModerationConfig parse_moderation(const toml::table& t) {
  check_keys(t, {"cooldown_ms", "rate_limit", "rate_window_ms", "session_cap", "escalation"}, "[moderation]");
  ModerationConfig m;
  m.cooldown = optional_value<std::int64_t>(t, "cooldown_ms", m.cooldown);
  m.rate_limit = static_cast<int>(optional_value<std::int64_t>(t, "rate_limit", m.rate_limit));
  m.rate_window = optional_value<std::int64_t>(t, "rate_window_ms", m.rate_window);
  if (t.contains("session_cap")) m.session_cap = static_cast<int>(required<std::int64_t>(t, "session_cap"));
  if (t.contains("escalation")) {
    auto e = parse_escalation(required<std::string>(t, "escalation"));
    if (!e) parse_fail("escalation must be \"off\" or \"warn_then_ban\"");
    m.escalation = *e;
  }
  return m;
}

ProfileGroup parse_profile(const toml::table& t) {
  check_keys(t,
             {"kind", "count", "fill", "react_prob", "latency_median_ms", "latency_sigma", "period_ms", "types",
              "start_ms"},
             "[[profiles]]");
  ProfileGroup g;
  const auto kind = required<std::string>(t, "kind");
  if (kind == "engaged") {
    g.kind = ProfileKind::Engaged;
  } else if (kind == "spammer") {
    g.kind = ProfileKind::Spammer;
  } else if (kind == "lurker") {
    g.kind = ProfileKind::Lurker;
  } else {
    parse_fail("unknown profile kind '" + kind + "'");
  }
  g.count = static_cast<int>(optional_value<std::int64_t>(t, "count", 0));
  g.fill = optional_value<bool>(t, "fill", false);
  g.engaged.react_prob = optional_value<double>(t, "react_prob", g.engaged.react_prob);
  g.engaged.latency_median_ms = optional_value<double>(t, "latency_median_ms", g.engaged.latency_median_ms);
  g.engaged.latency_sigma = optional_value<double>(t, "latency_sigma", g.engaged.latency_sigma);
  g.spammer.period = optional_value<std::int64_t>(t, "period_ms", g.spammer.period);
  g.spammer.start_offset = optional_value<std::int64_t>(t, "start_ms", g.spammer.start_offset);
  if (const auto* types = t["types"].as_array()) {
    g.spammer.types.clear();
    for (const auto& node : *types) {
      auto name = node.value<std::string>();
      if (!name) parse_fail("'types' must list strings");
      g.spammer.types.push_back(reaction_or_fail(*name));
    }
  }
  return g;
}

}  // namespace

int Scenario::active_count() const {
  return static_cast<int>(std::lround(enrollment * active_fraction));
}

DurationMs Scenario::duration_ms() const {
  return static_cast<DurationMs>(std::llround(duration_min * 60'000.0));
}

void Scenario::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, "scenario: " + what); };
  if (enrollment <= 0) fail("enrollment must be > 0");
  if (!(active_fraction >= 0.0) || active_fraction > 1.0) fail("active_fraction must be in [0, 1]");
  if (!(duration_min > 0.0)) fail("duration must be > 0");
  moderation.validate();

  int claimed = 0;
  int fills = 0;
  for (const auto& g : profiles) {
    if (g.count < 0) fail("profile count must be >= 0");
    claimed += g.count;
    fills += g.fill ? 1 : 0;
    if (g.kind == ProfileKind::Engaged) {
      const auto& e = g.engaged;
      if (!(e.react_prob >= 0.0) || e.react_prob > 1.0) fail("react_prob must be in [0, 1]");
      if (!(e.latency_median_ms > 0.0)) fail("latency_median_ms must be > 0");
      if (!(e.latency_sigma >= 0.0)) fail("latency_sigma must be >= 0");
    }
    if (g.kind == ProfileKind::Spammer) {
      if (g.spammer.period <= 0) fail("spammer period must be > 0");
      if (g.spammer.types.empty()) fail("spammer needs at least one type");
      if (g.spammer.start_offset < 0) fail("spammer start_ms must be >= 0");
    }
  }
  if (fills > 1) fail("at most one profile group may set fill = true");
  if (claimed > active_count()) fail("profile counts exceed the active participants");
  for (std::size_t i = 1; i < script.size(); ++i) {
    if (script[i].at < script[i - 1].at) fail("lecture prompts must be in time order");
  }
}

Scenario parse_scenario(std::string_view toml_text) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    parse_fail(std::string(e.description()));
  }
  check_keys(root, {"name", "enrollment", "active_fraction", "duration_min", "seed", "moderation", "lecture", "profiles"},
             "scenario");

  Scenario s;
  s.name = optional_value<std::string>(root, "name", s.name);
  s.enrollment = static_cast<int>(required<std::int64_t>(root, "enrollment"));
  s.active_fraction = required<double>(root, "active_fraction");
  s.duration_min = optional_value<double>(root, "duration_min", s.duration_min);
  s.seed = static_cast<std::uint64_t>(optional_value<std::int64_t>(root, "seed", 1));

  if (const auto* mod = root["moderation"].as_table()) s.moderation = parse_moderation(*mod);

  if (const auto* lecture = root["lecture"].as_table()) {
    check_keys(*lecture, {"prompt_start_s", "prompt_every_s", "prompt_cycle", "prompts"}, "[lecture]");
    if (lecture->contains("prompt_every_s")) {
      const double every = required<double>(*lecture, "prompt_every_s");
      const double start = optional_value<double>(*lecture, "prompt_start_s", 60.0);
      if (!(every > 0.0)) parse_fail("prompt_every_s must be > 0");
      std::vector<ReactionType> cycle{kReactionTypes.begin(), kReactionTypes.end()};
      if (const auto* arr = (*lecture)["prompt_cycle"].as_array()) cycle = reaction_list(*arr, "prompt_cycle");
      if (cycle.empty()) parse_fail("prompt_cycle is empty");
      std::size_t i = 0;
      for (double t = start; t * 1000.0 < static_cast<double>(s.duration_ms()); t += every, ++i) {
        s.script.push_back({static_cast<DurationMs>(std::llround(t * 1000.0)), cycle[i % cycle.size()]});
      }
    }
    if (const auto* prompts = (*lecture)["prompts"].as_array()) {
      for (const auto& node : *prompts) {
        const auto* p = node.as_table();
        if (!p) parse_fail("[[lecture.prompts]] entries must be tables");
        check_keys(*p, {"at_s", "event"}, "[[lecture.prompts]]");
        const auto event = required<std::string>(*p, "event");
        auto kind = prompt_reaction(event);
        if (!kind) parse_fail("unknown prompt event '" + event + "'");
        s.script.push_back({static_cast<DurationMs>(std::llround(required<double>(*p, "at_s") * 1000.0)), *kind});
      }
    }
    std::stable_sort(s.script.begin(), s.script.end(), [](const Prompt& a, const Prompt& b) { return a.at < b.at; });
  }

  if (const auto* profiles = root["profiles"].as_array()) {
    for (const auto& node : *profiles) {
      const auto* t = node.as_table();
      if (!t) parse_fail("[[profiles]] entries must be tables");
      s.profiles.push_back(parse_profile(*t));
    }
  }

  try {
    s.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read scenario " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

namespace {

struct PresetRow {
  const char* name;
  int enrollment;
  double active_fraction;
  double duration_min;
  int spammers;
};

// Enrollment, participation rate and length per observed lecture.
constexpr PresetRow kPresets[] = {
    {"C1", 43, 0.40, 80, 0}, {"C2", 200, 0.21, 50, 1}, {"C3", 60, 0.28, 80, 2},
    {"C4", 90, 0.33, 80, 0}, {"C5", 50, 0.21, 80, 2},  {"C6", 70, 0.46, 50, 0},
};

std::string preset_toml_text(const PresetRow& row, std::string_view name, double react_prob) {
  std::ostringstream os;
  os << "# Modelled on lecture " << row.name << ": " << row.enrollment << " enrolled, "
     << static_cast<int>(std::lround(row.active_fraction * 100)) << "% active, " << row.duration_min << " min.\n"
     << "# active_fraction is read as the share of enrolled students who use the system at all.\n"
     << "# Engaged students react to lecture prompts with probability react_prob after a\n"
     << "# lognormal delay (median 4 s); spammers submit every 20 s cycling all three types.\n"
     << "name = \"" << name << "\"\n"
     << "enrollment = " << row.enrollment << "\n"
     << "active_fraction = " << row.active_fraction << "\n"
     << "duration_min = " << row.duration_min << "\n"
     << "seed = 2\n\n"
     << "[moderation]\n"
     << "cooldown_ms = 20000\n"
     << "rate_limit = 4\n"
     << "rate_window_ms = 300000\n"
     << "escalation = \"off\"\n\n"
     << "[lecture]\n"
     << "prompt_start_s = 60\n"
     << "prompt_every_s = 150\n"
     << "prompt_cycle = [\"confusing_moment\", \"question_call\", \"checkpoint\"]\n";
  if (row.spammers > 0) {
    os << "\n[[profiles]]\n"
       << "kind = \"spammer\"\n"
       << "count = " << row.spammers << "\n"
       << "period_ms = 20000\n"
       << "types = [\"Confused\", \"HandRaise\", \"Confident\"]\n";
  }
  os << "\n[[profiles]]\n"
     << "kind = \"engaged\"\n"
     << "fill = true\n"
     << "react_prob = " << react_prob << "\n"
     << "latency_median_ms = 4000\n"
     << "latency_sigma = 0.6\n";
  return os.str();
}

const PresetRow* find_preset(const std::string& name) {
  const std::string base = name == "C2-replay" ? "C2" : name;
  for (const auto& row : kPresets) {
    if (base == row.name) return &row;
  }
  return nullptr;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& row : kPresets) out.emplace_back(row.name);
  out.emplace_back("C2-replay");
  return out;
}

std::string preset_scenario_toml(const std::string& name) {
  const auto* row = find_preset(name);
  if (!row) throw Error(ErrorCode::InvalidArgument, "unknown preset '" + name + "'");
  // C2: an engaged rate of 0.38 puts the spammer's 150 reactions near 32% of the total.
  const double react_prob = std::string_view(row->name) == "C2" ? 0.38 : 0.4;
  return preset_toml_text(*row, name, react_prob);
}

Scenario preset_scenario(const std::string& name) {
  return parse_scenario(preset_scenario_toml(name));
}

std::unique_ptr<QuizResponder> responder_from_toml(std::string_view toml_text) {
  toml::table t;
  try {
    t = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    throw Error(ErrorCode::Parse, std::string("responder: ") + std::string(e.description()));
  }
  check_keys(t, {"policy", "seed", "abort_after", "map"}, "responder");
  const auto policy = optional_value<std::string>(t, "policy", "perfect");
  std::optional<int> abort_after;
  if (t.contains("abort_after")) abort_after = static_cast<int>(required<std::int64_t>(t, "abort_after"));

  if (policy == "perfect" && !abort_after) return std::make_unique<PerfectResponder>();
  if (policy == "random") {
    return std::make_unique<RandomResponder>(static_cast<std::uint64_t>(optional_value<std::int64_t>(t, "seed", 1)));
  }
  if (policy == "perfect" || policy == "map") {
    std::map<ReactionType, ReactionType> mapping;
    if (const auto* m = t["map"].as_table()) {
      for (const auto& [key, node] : *m) {
        auto to = node.value<std::string>();
        if (!to) throw Error(ErrorCode::Parse, "responder: map values must be reaction names");
        mapping[reaction_or_fail(key.str())] = reaction_or_fail(*to);
      }
    }
    return std::make_unique<MappedResponder>(std::move(mapping), abort_after);
  }
  throw Error(ErrorCode::Parse, "responder: unknown policy '" + policy + "'");
}

}  // namespace rxfeed
