#include "longadapt/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace longadapt {

const char* modality_name(Modality m) {
  switch (m) {
    case Modality::visual: return "visual";
    case Modality::audio: return "audio";
    case Modality::game: return "game";
  }
  return "?";
}

Modality modality_from_name(const std::string& s) {
  if (s == "visual") return Modality::visual;
  if (s == "audio") return Modality::audio;
  if (s == "game") return Modality::game;
  throw Error(Errc::parse_error, "unknown modality '" + s + "'");
}

const char* column_kind_name(ColumnKind k) {
  return k == ColumnKind::continuous ? "continuous" : "discrete";
}

ColumnKind column_kind_from_name(const std::string& s) {
  if (s == "continuous") return ColumnKind::continuous;
  if (s == "discrete") return ColumnKind::discrete;
  throw Error(Errc::parse_error, "unknown column kind '" + s + "'");
}

std::size_t FeatureSchema::count(Modality m) const {
  return static_cast<std::size_t>(
      std::count_if(columns.begin(), columns.end(),
                    [m](const Column& c) { return c.modality == m; }));
}

std::size_t FeatureSchema::count(ColumnKind k) const {
  return static_cast<std::size_t>(
      std::count_if(columns.begin(), columns.end(),
                    [k](const Column& c) { return c.kind == k; }));
}

std::vector<Modality> FeatureSchema::modalities() const {
  std::vector<Modality> out;
  for (Modality m : {Modality::visual, Modality::audio, Modality::game})
    if (count(m) > 0) out.push_back(m);
  return out;
}

void FeatureSchema::validate() const {
  if (columns.empty()) throw Error(Errc::schema_error, "schema has no columns");
  std::set<std::string> seen;
  for (const auto& c : columns)
    if (!seen.insert(c.name).second)
      throw Error(Errc::schema_error, "duplicate column name '" + c.name + "'");
}

void StudyManifest::validate() const {
  schema.validate();
  if (participants.size() < 2)
    throw Error(Errc::schema_error, "at least 2 participants required");
  if (frame_rate_hz <= 0.0)
    throw Error(Errc::schema_error, "frame_rate_hz must be positive");
  std::set<std::string> ids;
  for (const auto& p : participants) {
    if (!ids.insert(p.id).second)
      throw Error(Errc::schema_error, "duplicate participant id '" + p.id + "'");
    if (p.session_paths.empty())
      throw Error(Errc::schema_error, "participant '" + p.id + "' has no sessions");
  }
}

std::string resolve_session_path(const std::string& manifest_path,
                                 const std::string& session_path) {
  fs::path p(session_path);
  if (p.is_absolute()) return p.string();
  return (fs::path(manifest_path).parent_path() / p).string();
}

StudyManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse_error, "cannot open manifest " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, std::string("manifest json: ") + e.what());
  }
  StudyManifest m;
  try {
    for (const auto& c : j.at("schema"))
      m.schema.columns.push_back({c.at("name").get<std::string>(),
                                  modality_from_name(c.at("modality")),
                                  column_kind_from_name(c.at("kind"))});
    for (const auto& p : j.at("participants")) {
      StudyManifest::Participant part;
      part.id = p.at("id").get<std::string>();
      for (const auto& s : p.at("sessions"))
        part.session_paths.push_back(s.get<std::string>());
      m.participants.push_back(std::move(part));
    }
    m.frame_rate_hz = j.at("frame_rate_hz").get<double>();
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, std::string("manifest shape: ") + e.what());
  }
  m.validate();
  for (const auto& p : m.participants)
    for (const auto& s : p.session_paths) {
      std::string full = resolve_session_path(path, s);
      if (!fs::exists(full))
        throw Error(Errc::missing_session, full);
    }
  return m;
}

void write_manifest(const StudyManifest& m, const std::string& path) {
  json j;
  j["schema"] = json::array();
  for (const auto& c : m.schema.columns)
    j["schema"].push_back({{"name", c.name},
                           {"modality", modality_name(c.modality)},
                           {"kind", column_kind_name(c.kind)}});
  j["participants"] = json::array();
  for (const auto& p : m.participants)
    j["participants"].push_back({{"id", p.id}, {"sessions", p.session_paths}});
  j["frame_rate_hz"] = m.frame_rate_hz;
  std::ofstream out(path);
  if (!out) throw Error(Errc::parse_error, "cannot write manifest " + path);
  out << j.dump(2) << "\n";
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& ctx) {
  double v;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw Error(Errc::parse_error, "bad number '" + s + "' in " + ctx);
  return v;
}

Label parse_label(const std::string& s, const std::string& ctx) {
  if (s == "0") return Label::negative;
  if (s == "1") return Label::positive;
  if (s == "x") return Label::excluded;
  throw Error(Errc::parse_error, "bad label '" + s + "' in " + ctx);
}

// shortest decimal text that round-trips the double
std::string format_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back;
    std::sscanf(buf, "%lf", &back);
    if (back == v) break;
  }
  return buf;
}

}  // namespace

SessionData load_session(const std::string& path, const FeatureSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse_error, "cannot open session " + path);
  std::string line;
  if (!std::getline(in, line))
    throw Error(Errc::parse_error, "empty session file " + path);
  auto header = split_csv_line(line);
  const std::size_t ncols = schema.size() + 3;
  if (header.size() != ncols || header[0] != "timestamp" ||
      header[1] != "arousal" || header[2] != "valence")
    throw Error(Errc::column_mismatch, "bad header in " + path);
  for (std::size_t i = 0; i < schema.size(); ++i)
    if (header[i + 3] != schema.columns[i].name)
      throw Error(Errc::column_mismatch,
                  "column " + header[i + 3] + " does not match schema in " + path);

  SessionData s;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != ncols)
      throw Error(Errc::column_mismatch,
                  "row " + std::to_string(row) + " has " +
                      std::to_string(cells.size()) + " cells in " + path);
    FrameRecord f;
    std::string ctx = path + ":" + std::to_string(row);
    f.timestamp = parse_double(cells[0], ctx);
    f.arousal = parse_label(cells[1], ctx);
    f.valence = parse_label(cells[2], ctx);
    f.values.reserve(schema.size());
    for (std::size_t i = 0; i < schema.size(); ++i)
      f.values.push_back(cells[i + 3].empty() ? missing_value()
                                              : parse_double(cells[i + 3], ctx));
    if (!s.frames.empty() && f.timestamp <= s.frames.back().timestamp)
      throw Error(Errc::non_monotonic_timestamps,
                  "timestamp " + cells[0] + " at " + ctx);
    s.frames.push_back(std::move(f));
  }
  return s;
}

void write_session(const SessionData& s, const FeatureSchema& schema,
                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::parse_error, "cannot write session " + path);
  out << "timestamp,arousal,valence";
  for (const auto& c : schema.columns) out << "," << c.name;
  out << "\n";
  for (const auto& f : s.frames) {
    out << format_double(f.timestamp);
    for (Label l : {f.arousal, f.valence})
      out << "," << (l == Label::excluded ? "x" : l == Label::positive ? "1" : "0");
    for (double v : f.values) {
      out << ",";
      if (!is_missing(v)) out << format_double(v);
    }
    out << "\n";
  }
}

ExclusionResult exclude_absent_frames(const SessionData& s) {
  ExclusionResult r;
  r.session.participant_id = s.participant_id;
  r.session.session_index = s.session_index;
  for (const auto& f : s.frames) {
    if (f.arousal == Label::excluded || f.valence == Label::excluded)
      ++r.removed;
    else
      r.session.frames.push_back(f);
  }
  return r;
}

}  // namespace longadapt
