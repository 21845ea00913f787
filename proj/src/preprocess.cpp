#include "longadapt/preprocess.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "longadapt/kernels.hpp"

namespace longadapt {

std::size_t window_feature_count(const FeatureSchema& schema) {
  return 2 * schema.size() + schema.modalities().size();
}

std::vector<std::string> window_feature_names(const FeatureSchema& schema) {
  std::vector<std::string> names;
  names.reserve(window_feature_count(schema));
  for (const auto& c : schema.columns) {
    names.push_back(c.name + "__mean");
    names.push_back(c.name +
                    (c.kind == ColumnKind::continuous ? "__var" : "__chg"));
  }
  for (Modality m : schema.modalities())
    names.push_back(std::string("presence__") + modality_name(m));
  return names;
}

std::optional<int> window_label(const std::vector<Label>& frame_labels,
                                const WindowConfig& cfg) {
  std::size_t pos = 0, neg = 0;
  for (Label l : frame_labels) {
    if (l == Label::positive) ++pos;
    else if (l == Label::negative) ++neg;
  }
  const std::size_t labeled = pos + neg;
  if (frame_labels.empty()) return std::nullopt;
  double fraction = static_cast<double>(labeled) / frame_labels.size();
  if (fraction < cfg.min_label_fraction) return std::nullopt;
  return pos > neg ? 1 : 0;  // ties resolve to negative
}

std::vector<WindowInstance> window_features(const SessionData& session,
                                            const WindowConfig& cfg,
                                            const FeatureSchema& schema,
                                            double frame_rate_hz) {
  if (cfg.window_seconds <= 0 || cfg.shift_seconds <= 0 ||
      cfg.shift_seconds > cfg.window_seconds)
    throw Error(Errc::config_error, "invalid window configuration");
  std::vector<WindowInstance> out;
  if (session.frames.empty()) return out;

  const double duration =
      session.frames.back().timestamp + 1.0 / frame_rate_hz;
  const auto modalities = schema.modalities();
  const std::size_t nfeat = window_feature_count(schema);

  std::size_t lo = 0;  // first frame with timestamp >= start
  for (int k = 0;; ++k) {
    const double start = k * cfg.shift_seconds;
    const double end = start + cfg.window_seconds;
    if (end > duration + 1e-9) break;
    while (lo < session.frames.size() &&
           session.frames[lo].timestamp < start)
      ++lo;
    std::size_t hi = lo;  // one past last frame with timestamp < end
    while (hi < session.frames.size() && session.frames[hi].timestamp < end)
      ++hi;
    if (hi == lo) continue;  // no frames fall in this window

    std::vector<Label> arousal_labels, valence_labels;
    for (std::size_t i = lo; i < hi; ++i) {
      arousal_labels.push_back(session.frames[i].arousal);
      valence_labels.push_back(session.frames[i].valence);
    }
    auto la = window_label(arousal_labels, cfg);
    auto lv = window_label(valence_labels, cfg);
    if (!la || !lv) continue;

    WindowInstance w;
    w.participant_id = session.participant_id;
    w.session_index = session.session_index;
    w.window_start = start;
    w.arousal = *la;
    w.valence = *lv;
    w.features.reserve(nfeat);

    for (std::size_t c = 0; c < schema.size(); ++c) {
      double s = 0.0, s2 = 0.0;
      std::size_t n = 0;
      bool changed = false;
      double first = 0.0;
      for (std::size_t i = lo; i < hi; ++i) {
        double v = session.frames[i].values[c];
        if (is_missing(v)) continue;
        if (n == 0) first = v;
        else if (v != first) changed = true;
        s += v;
        s2 += v * v;
        ++n;
      }
      if (n == 0) {
        w.features.push_back(0.0);
        w.features.push_back(0.0);
        continue;
      }
      const double mean = s / n;
      if (schema.columns[c].kind == ColumnKind::continuous) {
        double var = s2 / n - mean * mean;  // population variance
        w.features.push_back(mean);
        w.features.push_back(var < 0.0 ? 0.0 : var);
      } else {
        w.features.push_back(mean);
        w.features.push_back(changed ? 1.0 : 0.0);
      }
    }
    for (Modality m : modalities) {
      std::size_t present = 0;
      for (std::size_t i = lo; i < hi; ++i) {
        bool all = true;
        for (std::size_t c = 0; c < schema.size(); ++c)
          if (schema.columns[c].modality == m &&
              is_missing(session.frames[i].values[c])) {
            all = false;
            break;
          }
        if (all) ++present;
      }
      w.features.push_back(static_cast<double>(present) / (hi - lo));
    }
    out.push_back(std::move(w));
  }
  return out;
}

Standardizer fit_standardizer(const std::vector<WindowInstance>& train) {
  if (train.empty()) throw Error(Errc::empty_training_set, "fit_standardizer");
  const std::size_t d = train[0].features.size();
  Standardizer st;
  st.mean.assign(d, 0.0);
  st.sd.assign(d, 1.0);
  st.mask.assign(d, 0);
  const double n = static_cast<double>(train.size());
  for (const auto& w : train) {
    if (w.features.size() != d)
      throw Error(Errc::dimension_mismatch, "inconsistent feature lengths");
    for (std::size_t j = 0; j < d; ++j) st.mean[j] += w.features[j];
  }
  for (std::size_t j = 0; j < d; ++j) st.mean[j] /= n;
  std::vector<double> var(d, 0.0);
  for (const auto& w : train)
    for (std::size_t j = 0; j < d; ++j) {
      double dlt = w.features[j] - st.mean[j];
      var[j] += dlt * dlt;
    }
  for (std::size_t j = 0; j < d; ++j) {
    var[j] /= n;
    if (var[j] > 0.0)
      st.sd[j] = std::sqrt(var[j]);
    else
      st.mask[j] = 1;
  }
  return st;
}

std::vector<double> apply_standardizer(const Standardizer& st,
                                       const std::vector<double>& features) {
  if (features.size() != st.size())
    throw Error(Errc::dimension_mismatch, "apply_standardizer");
  std::vector<double> out(features.size());
  std::vector<double> inv_sd(st.sd.size());
  for (std::size_t j = 0; j < st.sd.size(); ++j) inv_sd[j] = 1.0 / st.sd[j];
  kernels::standardize(features.data(), st.mean.data(), inv_sd.data(),
                       st.mask.data(), out.data(), features.size());
  return out;
}

std::vector<WindowInstance> apply_standardizer(
    const Standardizer& st, const std::vector<WindowInstance>& instances) {
  std::vector<double> inv_sd(st.sd.size());
  for (std::size_t j = 0; j < st.sd.size(); ++j) inv_sd[j] = 1.0 / st.sd[j];
  std::vector<WindowInstance> out = instances;
  for (auto& w : out) {
    if (w.features.size() != st.size())
      throw Error(Errc::dimension_mismatch, "apply_standardizer");
    std::vector<double> std_features(w.features.size());
    kernels::standardize(w.features.data(), st.mean.data(), inv_sd.data(),
                         st.mask.data(), std_features.data(),
                         w.features.size());
    w.features = std::move(std_features);
  }
  return out;
}

void write_windows_csv(const std::vector<WindowInstance>& windows,
                       const FeatureSchema& schema, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::parse_error, "cannot write " + path);
  out << "participant,session,window_start,arousal,valence";
  for (const auto& name : window_feature_names(schema)) out << "," << name;
  out << "\n";
  char buf[40];
  for (const auto& w : windows) {
    out << w.participant_id << "," << w.session_index << ",";
    std::snprintf(buf, sizeof buf, "%.17g", w.window_start);
    out << buf << "," << w.arousal << "," << w.valence;
    for (double v : w.features) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << "," << buf;
    }
    out << "\n";
  }
}

}  // namespace longadapt
