#include "longadapt/synthgen.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace longadapt {

void SynthConfig::validate() const {
  if (n_participants < 2)
    throw Error(Errc::config_error, "need at least 2 participants");
  if (static_cast<int>(sessions_per_participant.size()) != n_participants)
    throw Error(Errc::config_error,
                "sessions_per_participant length != n_participants");
  for (int s : sessions_per_participant)
    if (s < 1) throw Error(Errc::config_error, "each participant needs >= 1 session");
  if (session_seconds <= 0 || frame_rate_hz <= 0)
    throw Error(Errc::config_error, "session length and frame rate must be positive");
  if (n_visual < 1 || n_audio < 0 || n_game < 0)
    throw Error(Errc::config_error, "feature counts out of range");
  for (double r : {negative_rate_arousal, negative_rate_valence})
    if (r <= 0.0 || r >= 1.0)
      throw Error(Errc::config_error, "negative rates must lie in (0,1)");
  if (class_separation < 0 || participant_shift < 0 || concept_shift < 0 ||
      session_drift < 0)
    throw Error(Errc::config_error, "shift magnitudes must be non-negative");
  if (dropout_rate < 0 || dropout_rate >= 1 || exclusion_rate < 0 ||
      exclusion_rate >= 1)
    throw Error(Errc::config_error, "dropout/exclusion rates must lie in [0,1)");
  if (label_persistence < 0 || label_persistence >= 1)
    throw Error(Errc::config_error, "label_persistence must lie in [0,1)");
}

namespace {

json config_to_json(const SynthConfig& c) {
  return json{{"n_participants", c.n_participants},
              {"sessions_per_participant", c.sessions_per_participant},
              {"session_seconds", c.session_seconds},
              {"frame_rate_hz", c.frame_rate_hz},
              {"n_visual", c.n_visual},
              {"n_audio", c.n_audio},
              {"n_game", c.n_game},
              {"negative_rate_arousal", c.negative_rate_arousal},
              {"negative_rate_valence", c.negative_rate_valence},
              {"class_separation", c.class_separation},
              {"participant_shift", c.participant_shift},
              {"concept_shift", c.concept_shift},
              {"session_drift", c.session_drift},
              {"dropout_rate", c.dropout_rate},
              {"dropout_burst_seconds", c.dropout_burst_seconds},
              {"exclusion_rate", c.exclusion_rate},
              {"label_persistence", c.label_persistence},
              {"seed", c.seed}};
}

}  // namespace

std::string SynthConfig::to_json() const { return config_to_json(*this).dump(2); }

SynthConfig SynthConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config_error, "cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Errc::config_error, std::string("config json: ") + e.what());
  }
  SynthConfig c;
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("n_participants", c.n_participants);
    get("sessions_per_participant", c.sessions_per_participant);
    get("session_seconds", c.session_seconds);
    get("frame_rate_hz", c.frame_rate_hz);
    get("n_visual", c.n_visual);
    get("n_audio", c.n_audio);
    get("n_game", c.n_game);
    get("negative_rate_arousal", c.negative_rate_arousal);
    get("negative_rate_valence", c.negative_rate_valence);
    get("class_separation", c.class_separation);
    get("participant_shift", c.participant_shift);
    get("concept_shift", c.concept_shift);
    get("session_drift", c.session_drift);
    get("dropout_rate", c.dropout_rate);
    get("dropout_burst_seconds", c.dropout_burst_seconds);
    get("exclusion_rate", c.exclusion_rate);
    get("label_persistence", c.label_persistence);
    get("seed", c.seed);
  } catch (const json::exception& e) {
    throw Error(Errc::config_error, std::string("config shape: ") + e.what());
  }
  c.validate();
  return c;
}

namespace {

using Vec = std::vector<double>;

Vec random_unit(Rng& rng, std::size_t dim) {
  Vec v(dim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& x : v) {
      x = rng.normal();
      norm2 += x * x;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& x : v) x *= inv;
  return v;
}

// unit vector at angle theta from base within the plane spanned by
// (base, fresh random direction)
Vec rotated_direction(Rng& rng, const Vec& base, double theta) {
  Vec v = random_unit(rng, base.size());
  double proj = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) proj += v[i] * base[i];
  double norm2 = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    v[i] -= proj * base[i];
    norm2 += v[i] * v[i];
  }
  if (norm2 == 0.0) return base;
  const double inv = 1.0 / std::sqrt(norm2);
  Vec out(base.size());
  for (std::size_t i = 0; i < base.size(); ++i)
    out[i] = std::cos(theta) * base[i] + std::sin(theta) * v[i] * inv;
  return out;
}

// stationary-initialized two-state chain: P(next=neg) =
// persistence*[cur=neg] + (1-persistence)*pi_neg
int next_label(Rng& rng, int cur_neg, double pi_neg, double persistence) {
  const double p_neg =
      persistence * cur_neg + (1.0 - persistence) * pi_neg;
  return rng.uniform() < p_neg ? 1 : 0;  // returns "is negative"
}

}  // namespace

SynthStudy generate_study(const SynthConfig& cfg) {
  cfg.validate();
  const int n_cont = cfg.n_visual + cfg.n_audio;

  SynthStudy study;
  auto& schema = study.manifest.schema;
  for (int i = 0; i < cfg.n_visual; ++i)
    schema.columns.push_back(
        {"v" + std::to_string(i), Modality::visual, ColumnKind::continuous});
  for (int i = 0; i < cfg.n_audio; ++i)
    schema.columns.push_back(
        {"a" + std::to_string(i), Modality::audio, ColumnKind::continuous});
  for (int i = 0; i < cfg.n_game; ++i)
    schema.columns.push_back(
        {"g" + std::to_string(i), Modality::game, ColumnKind::discrete});
  study.manifest.frame_rate_hz = cfg.frame_rate_hz;

  Rng dir_rng(hash_combine(cfg.seed, hash_string("directions")));
  const Vec base_a = random_unit(dir_rng, n_cont);
  const Vec base_v = random_unit(dir_rng, n_cont);

  const int frames_per_session =
      static_cast<int>(cfg.session_seconds * cfg.frame_rate_hz);
  const double burst_frames =
      std::max(1.0, cfg.dropout_burst_seconds * cfg.frame_rate_hz);

  for (int p = 0; p < cfg.n_participants; ++p) {
    const std::string pid = "P" + std::to_string(p + 1);
    Rng prng(hash_combine(cfg.seed, hash_string("participant:" + pid)));
    const Vec dir_a = rotated_direction(prng, base_a, cfg.concept_shift);
    const Vec dir_v = rotated_direction(prng, base_v, cfg.concept_shift);
    Vec offset = random_unit(prng, n_cont);
    for (auto& x : offset) x *= cfg.participant_shift;

    StudyManifest::Participant part;
    part.id = pid;
    for (int s = 1; s <= cfg.sessions_per_participant[p]; ++s) {
      const std::string fname = pid + "_s" + std::to_string(s) + ".csv";
      part.session_paths.push_back(fname);

      Rng rng(hash_combine(cfg.seed,
                           hash_string("session:" + pid + ":" + std::to_string(s))));
      Vec drift(n_cont, 0.0);
      if (cfg.session_drift > 0.0) {
        drift = random_unit(rng, n_cont);
        for (auto& x : drift) x *= cfg.session_drift;
      }

      SessionData session;
      session.participant_id = pid;
      session.session_index = s;

      int neg_a = rng.uniform() < cfg.negative_rate_arousal ? 1 : 0;
      int neg_v = rng.uniform() < cfg.negative_rate_valence ? 1 : 0;
      std::vector<int> game_state(cfg.n_game);
      for (auto& g : game_state) g = static_cast<int>(rng.next_below(5));
      std::vector<int> dropout_left(3, 0);  // per modality
      int exclusion_left = 0;

      for (int f = 0; f < frames_per_session; ++f) {
        if (f > 0) {
          neg_a = next_label(rng, neg_a, cfg.negative_rate_arousal,
                             cfg.label_persistence);
          neg_v = next_label(rng, neg_v, cfg.negative_rate_valence,
                             cfg.label_persistence);
        }
        FrameRecord frame;
        frame.timestamp = f / cfg.frame_rate_hz;
        frame.arousal = neg_a ? Label::negative : Label::positive;
        frame.valence = neg_v ? Label::negative : Label::positive;

        if (cfg.exclusion_rate > 0.0) {
          if (exclusion_left == 0 &&
              rng.uniform() < cfg.exclusion_rate / burst_frames)
            exclusion_left = static_cast<int>(burst_frames);
          if (exclusion_left > 0) {
            --exclusion_left;
            frame.arousal = Label::excluded;
            frame.valence = Label::excluded;
          }
        }

        const double shift_a = (neg_a ? -0.5 : 0.5) * cfg.class_separation;
        const double shift_v = (neg_v ? -0.5 : 0.5) * cfg.class_separation;
        frame.values.resize(schema.size());
        for (int c = 0; c < n_cont; ++c)
          frame.values[c] = offset[c] + drift[c] + shift_a * dir_a[c] +
                            shift_v * dir_v[c] + rng.normal();
        for (int gidx = 0; gidx < cfg.n_game; ++gidx) {
          if (rng.uniform() < 0.1)
            game_state[gidx] = static_cast<int>(rng.next_below(5));
          frame.values[n_cont + gidx] = game_state[gidx];
        }

        // contiguous dropout bursts per modality
        const Modality mods[3] = {Modality::visual, Modality::audio,
                                  Modality::game};
        for (int m = 0; m < 3; ++m) {
          if (cfg.dropout_rate > 0.0 && dropout_left[m] == 0 &&
              rng.uniform() < cfg.dropout_rate / burst_frames)
            dropout_left[m] = static_cast<int>(burst_frames);
          if (dropout_left[m] > 0) {
            --dropout_left[m];
            for (std::size_t c = 0; c < schema.size(); ++c)
              if (schema.columns[c].modality == mods[m])
                frame.values[c] = missing_value();
          }
        }
        session.frames.push_back(std::move(frame));
      }
      study.sessions.push_back(std::move(session));
    }
    study.manifest.participants.push_back(std::move(part));
  }
  return study;
}

std::string write_study(const SynthStudy& study, const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::size_t idx = 0;
  for (const auto& part : study.manifest.participants)
    for (const auto& fname : part.session_paths) {
      write_session(study.sessions[idx], study.manifest.schema,
                    (fs::path(out_dir) / fname).string());
      ++idx;
    }
  const std::string manifest_path =
      (fs::path(out_dir) / "manifest.json").string();
  write_manifest(study.manifest, manifest_path);
  return manifest_path;
}

double bayes_auroc(const SynthConfig& cfg, int participant, Task task,
                   int frames_per_window) {
  cfg.validate();
  if (participant < 0 || participant >= cfg.n_participants)
    throw Error(Errc::config_error, "participant index out of range");
  if (frames_per_window < 1)
    throw Error(Errc::config_error, "frames_per_window must be >= 1");
  (void)task;  // both tasks share the separation magnitude
  // class means differ by class_separation along a unit direction with
  // i.i.d. unit noise; averaging n frames scales the noise by 1/sqrt(n)
  const double delta =
      cfg.class_separation * std::sqrt(static_cast<double>(frames_per_window));
  return 0.5 * std::erfc(-delta / 2.0);  // Phi(delta / sqrt(2))
}

}  // namespace longadapt
