#include "rxfeed/record.hpp"

#include <fstream>
#include <sstream>

namespace rxfeed {

using nlohmann::json;

std::string_view to_string(ModerationAction action) noexcept {
  return action == ModerationAction::Warn ? "warn" : "ban";
}

std::vector<AcceptedReaction> SessionRecord::accepted() const {
  std::vector<AcceptedReaction> out;
  for (const auto& s : submissions) {
    if (s.verdict.accepted()) out.push_back({s.arrival, s.user, s.kind, s.at});
  }
  return out;
}

AnalyticsConfig SessionRecord::analytics_config() const {
  AnalyticsConfig cfg;
  cfg.bin_width = config.value("timeline_bin_ms", cfg.bin_width);
  cfg.dominance_threshold = config.value("dominance_threshold", cfg.dominance_threshold);
  cfg.log_limit = config.value("log_limit", cfg.log_limit);
  return cfg;
}

AnalyticsSnapshot SessionRecord::analytics() const {
  const auto reactions = accepted();
  return compute_analytics(reactions, ended_at, analytics_config());
}

namespace {

json header_json(const SessionRecord& r) {
  return json{{"type", "header"},
              {"format", kRecordFormatVersion},
              {"session_id", r.id.str()},
              {"created_at", r.created_at},
              {"ended_at", r.ended_at},
              {"participants", r.participants},
              {"config", r.config}};
}

json submission_json(const LoggedSubmission& s) {
  return json{{"type", "submission"},
              {"arrival", s.arrival},
              {"user", s.user},
              {"kind", to_string(s.kind)},
              {"at", s.at},
              {"verdict", to_string(s.verdict.kind)},
              {"remaining_ms", s.verdict.remaining_ms}};
}

json moderation_json(const ModerationEvent& m) {
  return json{{"type", "moderation"}, {"user", m.user}, {"action", to_string(m.action)}, {"at", m.at}};
}

json window_json(const AggregationWindow& w) {
  json j = w;
  j["type"] = "window";
  return j;
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::Parse, std::string("record: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("record: bad field '") + key + "': " + e.what());
  }
}

ReactionType kind_field(const json& j) {
  auto kind = parse_reaction_type(field<std::string>(j, "kind"));
  if (!kind) throw Error(ErrorCode::Parse, "record: unknown reaction kind");
  return *kind;
}

void apply_header(SessionRecord& r, const json& j) {
  if (field<int>(j, "format") != kRecordFormatVersion) {
    throw Error(ErrorCode::Parse, "record: unsupported format version");
  }
  auto id = SessionId::parse(field<std::string>(j, "session_id"));
  if (!id) throw Error(ErrorCode::Parse, "record: malformed session id");
  r.id = *id;
  r.created_at = field<TimestampMs>(j, "created_at");
  r.ended_at = field<TimestampMs>(j, "ended_at");
  r.participants = field<std::uint64_t>(j, "participants");
  r.config = j.value("config", json::object());
}

LoggedSubmission parse_submission(const json& j) {
  auto verdict = parse_verdict_kind(field<std::string>(j, "verdict"));
  if (!verdict) throw Error(ErrorCode::Parse, "record: unknown verdict");
  return {field<std::uint64_t>(j, "arrival"), field<std::string>(j, "user"), kind_field(j),
          field<TimestampMs>(j, "at"), {*verdict, field<DurationMs>(j, "remaining_ms")}};
}

ModerationEvent parse_moderation(const json& j) {
  const auto action = field<std::string>(j, "action");
  if (action != "warn" && action != "ban") throw Error(ErrorCode::Parse, "record: unknown moderation action");
  return {field<std::string>(j, "user"), action == "warn" ? ModerationAction::Warn : ModerationAction::Ban,
          field<TimestampMs>(j, "at")};
}

AggregationWindow parse_window(const SessionId& id, const json& j) {
  return {id, kind_field(j), field<TimestampMs>(j, "opened_at"), field<std::uint32_t>(j, "count")};
}

}  // namespace

json to_json(const SessionRecord& record) {
  json j = header_json(record);
  j.erase("type");
  auto subs = json::array();
  for (const auto& s : record.submissions) {
    auto e = submission_json(s);
    e.erase("type");
    subs.push_back(std::move(e));
  }
  auto mods = json::array();
  for (const auto& m : record.moderation) {
    auto e = moderation_json(m);
    e.erase("type");
    mods.push_back(std::move(e));
  }
  j["submissions"] = std::move(subs);
  j["moderation"] = std::move(mods);
  j["windows"] = record.windows;
  return j;
}

SessionRecord record_from_json(const json& j) {
  SessionRecord r;
  apply_header(r, j);
  for (const auto& s : j.value("submissions", json::array())) r.submissions.push_back(parse_submission(s));
  for (const auto& m : j.value("moderation", json::array())) r.moderation.push_back(parse_moderation(m));
  for (const auto& w : j.value("windows", json::array())) r.windows.push_back(parse_window(r.id, w));
  return r;
}

std::string to_jsonl(const SessionRecord& record) {
  std::string out = header_json(record).dump() + "\n";
  for (const auto& s : record.submissions) out += submission_json(s).dump() + "\n";
  for (const auto& m : record.moderation) out += moderation_json(m).dump() + "\n";
  for (const auto& w : record.windows) out += window_json(w).dump() + "\n";
  return out;
}

SessionRecord record_from_jsonl(std::string_view text) {
  SessionRecord r;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;

    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw Error(ErrorCode::Parse, "record: line " + std::to_string(line_no) + " is not a JSON object");
    }
    const auto type = field<std::string>(j, "type");
    if (!have_header) {
      if (type != "header") throw Error(ErrorCode::Parse, "record: first line must be the header");
      apply_header(r, j);
      have_header = true;
    } else if (type == "submission") {
      r.submissions.push_back(parse_submission(j));
    } else if (type == "moderation") {
      r.moderation.push_back(parse_moderation(j));
    } else if (type == "window") {
      r.windows.push_back(parse_window(r.id, j));
    } else {
      throw Error(ErrorCode::Parse, "record: unexpected line type '" + type + "'");
    }
  }
  if (!have_header) throw Error(ErrorCode::Parse, "record: empty file");
  return r;
}

RecordStore::RecordStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create data dir " + dir_.string() + ": " + ec.message());
}

std::filesystem::path RecordStore::path_for(const SessionId& id) const {
  return dir_ / (id.str() + ".jsonl");
}

bool RecordStore::contains(const SessionId& id) const {
  return std::filesystem::exists(path_for(id));
}

void RecordStore::save(const SessionRecord& record) {
  const auto final_path = path_for(record.id);
  const auto tmp_path = final_path.string() + ".tmp";
  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    out << to_jsonl(record);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp_path);
  }
  std::error_code ec;
  std::filesystem::rename(tmp_path, final_path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot move record into place: " + ec.message());

  std::ofstream index(dir_ / "index.jsonl", std::ios::binary | std::ios::app);
  index << json{{"session_id", record.id.str()},
                {"file", final_path.filename().string()},
                {"created_at", record.created_at},
                {"ended_at", record.ended_at},
                {"submissions", record.submissions.size()}}
               .dump()
        << "\n";
  if (!index) throw Error(ErrorCode::Io, "cannot append to index");
}

SessionRecord load_record_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::SessionNotFound, "no record at " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return record_from_jsonl(buf.str());
}

SessionRecord RecordStore::load(const SessionId& id) const {
  return load_record_file(path_for(id));
}

}  // namespace rxfeed
