#include "longadapt/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace longadapt {

const char* method_name(Method m) {
  switch (m) {
    case Method::individualized: return "IND";
    case Method::generic: return "GEN";
    case Method::personalized_sda: return "PER";
    case Method::personalized_uda: return "UDA";
  }
  return "?";
}

const char* method_long_name(Method m) {
  switch (m) {
    case Method::individualized: return "individualized";
    case Method::generic: return "generic";
    case Method::personalized_sda: return "personalized_sda";
    case Method::personalized_uda: return "personalized_uda";
  }
  return "?";
}

Method method_from_name(const std::string& s) {
  if (s == "IND" || s == "individualized") return Method::individualized;
  if (s == "GEN" || s == "generic") return Method::generic;
  if (s == "PER" || s == "personalized_sda") return Method::personalized_sda;
  if (s == "UDA" || s == "personalized_uda") return Method::personalized_uda;
  throw Error(Errc::parse_error, "unknown method '" + s + "'");
}

std::vector<int> StudyWindows::session_indices(
    const std::string& participant) const {
  std::vector<int> out;
  for (const auto& [key, windows] : sessions)
    if (key.first == participant) out.push_back(key.second);
  std::sort(out.begin(), out.end());
  return out;
}

StudyWindows build_study_windows(const StudyManifest& manifest,
                                 const std::vector<SessionData>& sessions,
                                 const WindowConfig& cfg) {
  StudyWindows study;
  study.schema = manifest.schema;
  for (const auto& p : manifest.participants)
    study.participant_order.push_back(p.id);
  for (const auto& s : sessions)
    study.sessions[{s.participant_id, s.session_index}] =
        window_features(s, cfg, manifest.schema, manifest.frame_rate_hz);
  return study;
}

StudyWindows load_study_windows(const std::string& manifest_path,
                                const WindowConfig& cfg) {
  StudyManifest manifest = load_manifest(manifest_path);
  std::vector<SessionData> sessions;
  for (const auto& p : manifest.participants) {
    int idx = 0;
    for (const auto& rel : p.session_paths) {
      SessionData s = load_session(resolve_session_path(manifest_path, rel),
                                   manifest.schema);
      s.participant_id = p.id;
      s.session_index = ++idx;
      sessions.push_back(std::move(s));
    }
  }
  return build_study_windows(manifest, sessions, cfg);
}

std::vector<ExperimentPlan> plan_round(const StudyWindows& study,
                                       const std::string& test_participant,
                                       Method method, ModelKind kind,
                                       Task task) {
  const auto indices = study.session_indices(test_participant);
  if (indices.empty())
    throw Error(Errc::missing_session,
                "unknown participant '" + test_participant + "'");
  std::vector<std::string> sources;
  for (const auto& pid : study.participant_order)
    if (pid != test_participant) sources.push_back(pid);

  std::vector<ExperimentPlan> plans;
  // S-1 chronological experiments: train on sessions 1..j, test on j+1
  for (std::size_t j = 1; j < indices.size(); ++j) {
    ExperimentPlan plan;
    plan.test_participant = test_participant;
    plan.train_sessions.assign(indices.begin(), indices.begin() + j);
    plan.test_session = indices[j];
    plan.source_participants = sources;
    plan.method = method;
    plan.kind = kind;
    plan.task = task;
    plans.push_back(std::move(plan));
  }
  return plans;
}

void audit_plans(const std::vector<ExperimentPlan>& plans) {
  for (const auto& plan : plans) {
    if (plan.train_sessions.empty())
      throw Error(Errc::config_error, "plan has no training sessions");
    for (int s : plan.train_sessions)
      if (s >= plan.test_session)
        throw Error(Errc::config_error,
                    "training session " + std::to_string(s) +
                        " not strictly before test session " +
                        std::to_string(plan.test_session));
    for (const auto& src : plan.source_participants)
      if (src == plan.test_participant)
        throw Error(Errc::config_error,
                    "test participant appears in source set");
  }
}

namespace {

Dataset to_dataset(const std::vector<WindowInstance>& windows, Task task) {
  Dataset d;
  d.x.reserve(windows.size());
  for (const auto& w : windows) {
    d.x.push_back(w.features);
    d.y.push_back(task == Task::arousal ? w.arousal : w.valence);
  }
  return d;
}

uint64_t fingerprint_windows(const std::vector<WindowInstance>& windows) {
  uint64_t h = 0x5244b1f1ULL;
  for (const auto& w : windows) {
    h = hash_combine(h, hash_string(w.participant_id));
    h = hash_combine(h, static_cast<uint64_t>(w.session_index));
    uint64_t bits;
    static_assert(sizeof bits == sizeof w.window_start);
    std::memcpy(&bits, &w.window_start, sizeof bits);
    h = hash_combine(h, bits);
    h = hash_combine(h, static_cast<uint64_t>(w.arousal * 2 + w.valence));
  }
  return h;
}

uint64_t cell_seed(uint64_t global_seed, const ExperimentPlan& plan) {
  uint64_t h = global_seed;
  h = hash_combine(h, hash_string(plan.test_participant));
  h = hash_combine(h, static_cast<uint64_t>(plan.test_session));
  h = hash_combine(h, static_cast<uint64_t>(plan.method));
  h = hash_combine(h, static_cast<uint64_t>(plan.kind));
  h = hash_combine(h, static_cast<uint64_t>(plan.task));
  return h;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentPlan& plan,
                                const StudyWindows& study,
                                const ModelSpec& spec,
                                const AdaptationConfig& acfg,
                                uint64_t global_seed) {
  audit_plans({plan});

  std::vector<WindowInstance> target_train;
  for (int s : plan.train_sessions) {
    auto it = study.sessions.find({plan.test_participant, s});
    if (it == study.sessions.end())
      throw Error(Errc::missing_session, "no windows for training session");
    target_train.insert(target_train.end(), it->second.begin(),
                        it->second.end());
  }
  std::vector<WindowInstance> source_train;
  for (const auto& pid : plan.source_participants)
    for (const auto& [key, windows] : study.sessions)
      if (key.first == pid)
        source_train.insert(source_train.end(), windows.begin(), windows.end());
  auto test_it = study.sessions.find({plan.test_participant, plan.test_session});
  if (test_it == study.sessions.end() || test_it->second.empty())
    throw Error(Errc::missing_session, "no windows for test session");
  const auto& test_raw = test_it->second;

  // train-only standardization; the pool depends on what the method fits on
  std::vector<WindowInstance> std_pool;
  const bool uses_target = plan.method == Method::individualized ||
                           plan.method == Method::personalized_sda;
  const bool uses_source = plan.method != Method::individualized;
  if (uses_target)
    std_pool.insert(std_pool.end(), target_train.begin(), target_train.end());
  if (uses_source)
    std_pool.insert(std_pool.end(), source_train.begin(), source_train.end());
  Standardizer st = fit_standardizer(std_pool);

  const auto target_std = apply_standardizer(st, target_train);
  const auto source_std = apply_standardizer(st, source_train);
  const auto test_std = apply_standardizer(st, test_raw);

  ExperimentResult result;
  result.plan = plan;
  result.n_test_instances = test_raw.size();
  result.test_fingerprint = fingerprint_windows(test_raw);

  Dataset test = to_dataset(test_std, plan.task);
  {
    bool has0 = false, has1 = false;
    for (int y : test.y) (y ? has1 : has0) = true;
    if (!has0 || !has1)
      throw Error(Errc::single_class, "SingleClassTestSession");
  }

  ModelSpec cell_spec = spec;
  cell_spec.seed = cell_seed(global_seed, plan);
  std::unique_ptr<TrainedModel> model;

  switch (plan.method) {
    case Method::individualized: {
      Dataset train = to_dataset(target_std, plan.task);
      WeightedDataset data{std::move(train.x), std::move(train.y), {}};
      data.w.assign(data.x.size(), 1.0);
      model = train_classifier(cell_spec, data);
      break;
    }
    case Method::generic: {
      Dataset train = to_dataset(source_std, plan.task);
      WeightedDataset data{std::move(train.x), std::move(train.y), {}};
      data.w.assign(data.x.size(), 1.0);
      model = train_classifier(cell_spec, data);
      break;
    }
    case Method::personalized_sda: {
      AdaptationConfig cell_cfg = acfg;
      cell_cfg.seed = cell_spec.seed;
      auto [m, search] =
          train_personalized(to_dataset(source_std, plan.task),
                             {to_dataset(target_std, plan.task)}, cell_spec,
                             cell_cfg);
      model = std::move(m);
      result.chosen_alpha = search.chosen_alpha;
      break;
    }
    case Method::personalized_uda: {
      // transductive: the test session's features (never its labels) supply
      // the target statistics
      model = train_personalized_uda(to_dataset(source_std, plan.task),
                                     test.x, cell_spec);
      break;
    }
  }

  std::vector<double> scores;
  std::vector<int> pred;
  scores.reserve(test.size());
  for (const auto& x : test.x) {
    scores.push_back(model->predict_score(x));
    pred.push_back(scores.back() >= 0.5 ? 1 : 0);
  }
  result.auroc_value = auroc(scores, test.y);
  result.roc = roc_points(scores, test.y);
  result.f1_positive = f1(pred, test.y, 1);
  result.f1_negative = f1(pred, test.y, 0);
  return result;
}

RoundSummary weighted_average(const std::vector<ExperimentResult>& results) {
  if (results.empty()) throw Error(Errc::empty_results, "weighted_average");
  RoundSummary summary;
  summary.results = results;
  double wsum = 0.0;
  for (const auto& r : results) {
    const double w = static_cast<double>(r.n_test_instances);
    wsum += w;
    summary.w_auroc += w * r.auroc_value;
    summary.w_f1_positive += w * r.f1_positive;
    summary.w_f1_negative += w * r.f1_negative;
  }
  summary.w_auroc /= wsum;
  summary.w_f1_positive /= wsum;
  summary.w_f1_negative /= wsum;
  return summary;
}

std::string CellKey::to_string() const {
  return std::string(task_name(task)) + "-" + model_kind_name(kind) + "-" +
         method_name(method) + "-" + participant + "-s" +
         std::to_string(test_session);
}

StudyResult run_study(const StudyWindows& study,
                      const std::vector<Method>& methods,
                      const std::vector<ModelKind>& kinds,
                      const std::vector<Task>& tasks, const ModelSpec& base_spec,
                      const AdaptationConfig& acfg, uint64_t seed,
                      int n_threads) {
  std::vector<ExperimentPlan> plans;
  for (Task task : tasks)
    for (ModelKind kind : kinds)
      for (Method method : methods)
        for (const auto& pid : study.participant_order)
          for (auto& plan : plan_round(study, pid, method, kind, task))
            plans.push_back(std::move(plan));
  audit_plans(plans);

  struct Slot {
    bool ok = false;
    ExperimentResult result;
    std::string error;
  };
  std::vector<Slot> slots(plans.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= plans.size()) return;
      try {
        slots[i].result =
            run_experiment(plans[i], study, base_spec, acfg, seed);
        slots[i].ok = true;
      } catch (const std::exception& e) {
        slots[i].error = e.what();
      }
    }
  };
  const int nt = std::max(1, n_threads);
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  StudyResult out;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto& plan = plans[i];
    CellKey key{plan.task, plan.kind, plan.method, plan.test_participant,
                plan.test_session};
    if (slots[i].ok)
      out.cells.emplace(key, std::move(slots[i].result));
    else
      out.skipped.push_back({key, slots[i].error});
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_results_csv(const StudyResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::parse_error, "cannot write " + path);
  out << "round,participant,test_session,method,kind,task,auroc,f1_pos,f1_neg,n,alpha\n";
  for (const auto& [key, r] : result.cells) {
    out << key.participant << "," << key.participant << ","
        << key.test_session << "," << method_name(key.method) << ","
        << model_kind_name(key.kind) << "," << task_name(key.task) << ","
        << fmt(r.auroc_value) << "," << fmt(r.f1_positive) << ","
        << fmt(r.f1_negative) << "," << r.n_test_instances << ",";
    if (r.chosen_alpha) out << fmt(*r.chosen_alpha);
    out << "\n";
  }
}

std::string results_to_json(const StudyResult& result) {
  json cells = json::array();
  for (const auto& [key, r] : result.cells) {
    cells.push_back({{"participant", key.participant},
                     {"test_session", key.test_session},
                     {"method", method_name(key.method)},
                     {"kind", model_kind_name(key.kind)},
                     {"task", task_name(key.task)},
                     {"auroc", r.auroc_value},
                     {"f1_pos", r.f1_positive},
                     {"f1_neg", r.f1_negative},
                     {"n", r.n_test_instances},
                     {"alpha", r.chosen_alpha ? json(*r.chosen_alpha) : json()}});
  }
  json skipped = json::array();
  for (const auto& s : result.skipped)
    skipped.push_back({{"cell", s.key.to_string()}, {"reason", s.reason}});
  return json{{"cells", std::move(cells)}, {"skipped", std::move(skipped)}}
      .dump(2);
}

void write_roc_files(const StudyResult& result, const std::string& dir) {
  fs::create_directories(dir);
  for (const auto& [key, r] : result.cells) {
    std::ofstream out(fs::path(dir) / (key.to_string() + ".roc.csv"));
    out << "fpr,tpr\n";
    for (const auto& p : r.roc)
      out << fmt(p.fpr) << "," << fmt(p.tpr) << "\n";
  }
}

}  // namespace longadapt
