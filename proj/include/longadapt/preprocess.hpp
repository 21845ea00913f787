#pragma once

#include <optional>
#include <string>
#include <vector>

#include "longadapt/dataset.hpp"

namespace longadapt {

struct WindowConfig {
  double window_seconds = 3.0;
  double shift_seconds = 1.0;
  double min_label_fraction = 0.5;  // in (0,1]
};

// One 3-second (by default) window of aggregated features with one binary
// label per task. Feature layout: for every schema column in order,
// continuous -> (mean, variance), discrete -> (mean, changed-flag);
// then one presence-fraction per modality present in the schema.
struct WindowInstance {
  std::string participant_id;
  int session_index = 0;
  double window_start = 0.0;
  std::vector<double> features;
  int arousal = 0;
  int valence = 0;
};

std::size_t window_feature_count(const FeatureSchema& schema);
std::vector<std::string> window_feature_names(const FeatureSchema& schema);

// Majority vote over the non-excluded labels; empty optional when fewer
// than cfg.min_label_fraction of the frames carry a label. Ties go to 0.
std::optional<int> window_label(const std::vector<Label>& frame_labels,
                                const WindowConfig& cfg);

// Windows anchored at t=0 with stride cfg.shift_seconds; the session is
// taken to span [0, t_last + 1/frame_rate_hz). Windows whose label (either
// task) is dropped by window_label are omitted.
std::vector<WindowInstance> window_features(const SessionData& session,
                                            const WindowConfig& cfg,
                                            const FeatureSchema& schema,
                                            double frame_rate_hz);

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> sd;          // > 0 where not masked
  std::vector<std::uint8_t> mask;  // 1 = constant feature, output forced to 0

  std::size_t size() const { return mean.size(); }
};

// Per-feature mean and population standard deviation over the training set.
Standardizer fit_standardizer(const std::vector<WindowInstance>& train);

std::vector<double> apply_standardizer(const Standardizer& st,
                                       const std::vector<double>& features);
std::vector<WindowInstance> apply_standardizer(
    const Standardizer& st, const std::vector<WindowInstance>& instances);

void write_windows_csv(const std::vector<WindowInstance>& windows,
                       const FeatureSchema& schema, const std::string& path);

}  // namespace longadapt
