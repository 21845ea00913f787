#pragma once

#include <string>
#include <vector>

#include "longadapt/common.hpp"

namespace longadapt {

enum class Modality { visual, audio, game };
enum class ColumnKind { continuous, discrete };

const char* modality_name(Modality m);
Modality modality_from_name(const std::string& s);
const char* column_kind_name(ColumnKind k);
ColumnKind column_kind_from_name(const std::string& s);

struct FeatureSchema {
  struct Column {
    std::string name;
    Modality modality;
    ColumnKind kind;
  };
  std::vector<Column> columns;

  std::size_t size() const { return columns.size(); }
  std::size_t count(Modality m) const;
  std::size_t count(ColumnKind k) const;
  std::vector<Modality> modalities() const;  // distinct, in enum order
  // throws SchemaError on duplicate names or empty schema
  void validate() const;
};

// Per-frame label: 0, 1, or excluded ("x" in the session CSV).
enum class Label : int { negative = 0, positive = 1, excluded = 2 };

struct FrameRecord {
  double timestamp = 0.0;
  std::vector<double> values;  // NaN marks a missing cell
  Label arousal = Label::excluded;
  Label valence = Label::excluded;
};

struct SessionData {
  std::string participant_id;
  int session_index = 0;  // chronological, 1-based
  std::vector<FrameRecord> frames;
};

struct StudyManifest {
  struct Participant {
    std::string id;
    std::vector<std::string> session_paths;  // relative to the manifest file
  };
  FeatureSchema schema;
  std::vector<Participant> participants;
  double frame_rate_hz = 0.0;

  void validate() const;
};

StudyManifest load_manifest(const std::string& path);
void write_manifest(const StudyManifest& m, const std::string& path);

SessionData load_session(const std::string& path, const FeatureSchema& schema);
void write_session(const SessionData& s, const FeatureSchema& schema,
                   const std::string& path);

// Resolve a manifest-relative session path against the manifest location.
std::string resolve_session_path(const std::string& manifest_path,
                                 const std::string& session_path);

struct ExclusionResult {
  SessionData session;
  std::size_t removed = 0;
};

// Drops frames whose arousal or valence label is `excluded`.
ExclusionResult exclude_absent_frames(const SessionData& s);

}  // namespace longadapt
