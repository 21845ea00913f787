#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "longadapt/adaptation.hpp"
#include "longadapt/analysis.hpp"
#include "longadapt/dataset.hpp"
#include "longadapt/preprocess.hpp"
#include "longadapt/synthgen.hpp"

namespace longadapt {

enum class Method { individualized, generic, personalized_sda, personalized_uda };

const char* method_name(Method m);        // IND / GEN / PER / UDA
const char* method_long_name(Method m);
Method method_from_name(const std::string& s);  // accepts either form

struct ExperimentPlan {
  std::string test_participant;
  std::vector<int> train_sessions;  // 1..j of the test participant
  int test_session = 0;             // j+1
  std::vector<std::string> source_participants;
  Method method = Method::individualized;
  ModelKind kind = ModelKind::gbdt;
  Task task = Task::arousal;
};

struct ExperimentResult {
  ExperimentPlan plan;
  double auroc_value = 0.0;
  double f1_positive = 0.0;
  double f1_negative = 0.0;
  std::vector<RocPoint> roc;
  std::size_t n_test_instances = 0;
  std::optional<double> chosen_alpha;
  uint64_t test_fingerprint = 0;  // identity hash of the test instance set
};

struct RoundSummary {
  std::vector<ExperimentResult> results;
  double w_auroc = 0.0;
  double w_f1_positive = 0.0;
  double w_f1_negative = 0.0;
};

// Preprocessed (unstandardized) windows keyed by (participant, session).
struct StudyWindows {
  FeatureSchema schema;
  std::map<std::pair<std::string, int>, std::vector<WindowInstance>> sessions;
  std::vector<std::string> participant_order;

  std::vector<int> session_indices(const std::string& participant) const;
};

StudyWindows build_study_windows(const StudyManifest& manifest,
                                 const std::vector<SessionData>& sessions,
                                 const WindowConfig& cfg);
StudyWindows load_study_windows(const std::string& manifest_path,
                                const WindowConfig& cfg);

std::vector<ExperimentPlan> plan_round(const StudyWindows& study,
                                       const std::string& test_participant,
                                       Method method, ModelKind kind, Task task);

// Throws if any plan trains on data at or after its test session.
void audit_plans(const std::vector<ExperimentPlan>& plans);

ExperimentResult run_experiment(const ExperimentPlan& plan,
                                const StudyWindows& study,
                                const ModelSpec& spec,
                                const AdaptationConfig& acfg,
                                uint64_t global_seed);

RoundSummary weighted_average(const std::vector<ExperimentResult>& results);

struct CellKey {
  Task task;
  ModelKind kind;
  Method method;
  std::string participant;
  int test_session;

  auto operator<=>(const CellKey&) const = default;
  std::string to_string() const;
};

struct SkippedCell {
  CellKey key;
  std::string reason;
};

struct StudyResult {
  std::map<CellKey, ExperimentResult> cells;
  std::vector<SkippedCell> skipped;
};

// Every (participant, session, method, kind, task) cell; failed cells are
// recorded, never fatal. Deterministic for a fixed seed regardless of
// n_threads.
StudyResult run_study(const StudyWindows& study,
                      const std::vector<Method>& methods,
                      const std::vector<ModelKind>& kinds,
                      const std::vector<Task>& tasks, const ModelSpec& base_spec,
                      const AdaptationConfig& acfg, uint64_t seed,
                      int n_threads = 1);

void write_results_csv(const StudyResult& result, const std::string& path);
std::string results_to_json(const StudyResult& result);
void write_roc_files(const StudyResult& result, const std::string& dir);

}  // namespace longadapt
