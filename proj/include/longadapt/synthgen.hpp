#pragma once

#include <string>
#include <vector>

#include "longadapt/analysis.hpp"
#include "longadapt/dataset.hpp"

namespace longadapt {

// Deterministic synthetic multi-session study with Gaussian class
// conditionals, persistent labels, controllable participant shift,
// concept rotation, session drift, and modality dropout bursts.
struct SynthConfig {
  int n_participants = 4;
  std::vector<int> sessions_per_participant = {5, 6, 4, 4};
  double session_seconds = 600.0;
  double frame_rate_hz = 2.0;
  int n_visual = 6;
  int n_audio = 2;
  int n_game = 2;  // discrete, label-independent distractors
  double negative_rate_arousal = 0.3;
  double negative_rate_valence = 0.2;
  // distance between the class-conditional means along the task direction
  double class_separation = 1.0;
  double participant_shift = 0.0;  // offset magnitude shared by both classes
  double concept_shift = 0.0;      // per-participant rotation of the direction
  double session_drift = 0.0;
  double dropout_rate = 0.0;   // expected fraction of frames in a burst
  double dropout_burst_seconds = 2.0;
  double exclusion_rate = 0.0; // fraction of frames marked excluded
  double label_persistence = 0.9;
  uint64_t seed = 0;

  void validate() const;
  static SynthConfig from_json_file(const std::string& path);
  std::string to_json() const;
};

struct SynthStudy {
  StudyManifest manifest;  // session_paths filled with relative file names
  std::vector<SessionData> sessions;  // ordered as listed in the manifest
};

SynthStudy generate_study(const SynthConfig& cfg);

// Writes manifest.json plus session CSVs under out_dir; returns the
// manifest path.
std::string write_study(const SynthStudy& study, const std::string& out_dir);

// Analytic AUROC of the Bayes-optimal linear score for the participant's
// class-conditional distributions, for a window averaging
// frames_per_window i.i.d. frames of a single label.
double bayes_auroc(const SynthConfig& cfg, int participant, Task task,
                   int frames_per_window = 1);

}  // namespace longadapt
