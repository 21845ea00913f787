#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "longadapt/protocol.hpp"

using namespace longadapt;

namespace {

// small study with a learnable concept shared by all participants
StudyWindows tiny_study(uint64_t seed, std::vector<int> sessions = {3, 3},
                        double concept_shift = 0.0) {
  SynthConfig cfg;
  cfg.n_participants = static_cast<int>(sessions.size());
  cfg.sessions_per_participant = std::move(sessions);
  cfg.session_seconds = 90;
  cfg.frame_rate_hz = 1.0;
  cfg.n_visual = 3;
  cfg.n_audio = 1;
  cfg.n_game = 1;
  cfg.class_separation = 1.5;
  cfg.label_persistence = 0.93;
  cfg.concept_shift = concept_shift;
  cfg.seed = seed;
  auto study = generate_study(cfg);
  return build_study_windows(study.manifest, study.sessions, WindowConfig{});
}

ModelSpec quick_spec(ModelKind kind = ModelKind::logreg) {
  ModelSpec spec;
  spec.kind = kind;
  spec.gbdt.rounds = 10;
  return spec;
}

AdaptationConfig quick_acfg() {
  AdaptationConfig cfg;
  cfg.alpha_grid = {0.0, 0.5, 1.0};
  cfg.cv_folds = 3;
  return cfg;
}

}  // namespace

TEST_CASE("plan_round shapes") {
  auto study = tiny_study(3, {5, 2, 1});

  auto plans = plan_round(study, "P1", Method::individualized, ModelKind::gbdt,
                          Task::arousal);
  REQUIRE(plans.size() == 4);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(plans[j].test_session == static_cast<int>(j) + 2);
    REQUIRE(plans[j].train_sessions.size() == j + 1);
    for (std::size_t k = 0; k <= j; ++k)
      CHECK(plans[j].train_sessions[k] == static_cast<int>(k) + 1);
    CHECK(plans[j].source_participants ==
          std::vector<std::string>{"P2", "P3"});
  }

  CHECK(plan_round(study, "P2", Method::generic, ModelKind::gbdt, Task::arousal)
            .size() == 1);
  // single-session participant yields no plans
  CHECK(plan_round(study, "P3", Method::generic, ModelKind::gbdt, Task::arousal)
            .empty());
  CHECK_THROWS_AS(
      plan_round(study, "P9", Method::generic, ModelKind::gbdt, Task::arousal),
      Error);
}

TEST_CASE("audit rejects temporally unsound plans") {
  auto study = tiny_study(5);
  auto plans = plan_round(study, "P1", Method::personalized_sda,
                          ModelKind::logreg, Task::arousal);
  CHECK_NOTHROW(audit_plans(plans));

  auto tampered = plans;
  tampered[0].train_sessions.push_back(tampered[0].test_session);
  CHECK_THROWS_AS(audit_plans(tampered), Error);

  tampered = plans;
  tampered[0].source_participants.push_back(tampered[0].test_participant);
  CHECK_THROWS_AS(audit_plans(tampered), Error);
}

TEST_CASE("run_experiment is deterministic and fingerprinted") {
  auto study = tiny_study(7);
  auto plans =
      plan_round(study, "P1", Method::individualized, ModelKind::logreg,
                 Task::arousal);
  REQUIRE(!plans.empty());
  auto a = run_experiment(plans[0], study, quick_spec(), quick_acfg(), 42);
  auto b = run_experiment(plans[0], study, quick_spec(), quick_acfg(), 42);
  CHECK(a.auroc_value == b.auroc_value);
  CHECK(a.f1_positive == b.f1_positive);
  CHECK(a.test_fingerprint == b.test_fingerprint);
  CHECK(a.n_test_instances > 0);
  CHECK(a.roc.size() == b.roc.size());

  // all methods see the identical test set
  for (Method m : {Method::generic, Method::personalized_sda,
                   Method::personalized_uda}) {
    auto p = plans[0];
    p.method = m;
    auto r = run_experiment(p, study, quick_spec(), quick_acfg(), 42);
    CHECK(r.test_fingerprint == a.test_fingerprint);
    if (m == Method::personalized_sda) CHECK(r.chosen_alpha.has_value());
  }
}

TEST_CASE("standardizer leakage negative control") {
  // the individualized features standardized with train-only statistics must
  // differ from statistics refitted with the test session included
  auto study = tiny_study(11);
  const auto& train = study.sessions.at({"P1", 1});
  const auto& test = study.sessions.at({"P1", 2});

  auto st_train = fit_standardizer(train);
  auto polluted = train;
  polluted.insert(polluted.end(), test.begin(), test.end());
  auto st_both = fit_standardizer(polluted);

  bool changed = false;
  for (const auto& w : test) {
    auto a = apply_standardizer(st_train, w.features);
    auto b = apply_standardizer(st_both, w.features);
    if (a != b) changed = true;
  }
  CHECK(changed);
}

TEST_CASE("weighted_average worked examples") {
  ExperimentResult a, b;
  a.auroc_value = 0.9;
  a.f1_positive = 0.8;
  a.f1_negative = 0.6;
  a.n_test_instances = 100;
  b.auroc_value = 0.8;
  b.f1_positive = 0.6;
  b.f1_negative = 0.4;
  b.n_test_instances = 300;

  auto s = weighted_average({a, b});
  CHECK(s.w_auroc == doctest::Approx(0.825));
  CHECK(s.w_f1_positive == doctest::Approx(0.65));

  auto single = weighted_average({a});
  CHECK(single.w_auroc == a.auroc_value);

  b.n_test_instances = 100;  // equal counts -> plain mean
  CHECK(weighted_average({a, b}).w_auroc == doctest::Approx(0.85));

  CHECK_THROWS_AS(weighted_average({}), Error);
}

TEST_CASE("run_study emits the paper-shaped cell count") {
  auto study = tiny_study(13, {5, 6, 4, 4});
  auto result =
      run_study(study, {Method::individualized}, {ModelKind::logreg},
                {Task::arousal}, quick_spec(), quick_acfg(), 1);
  // 4 + 5 + 3 + 3 = 15 cells, minus any single-class test sessions
  CHECK(result.cells.size() + result.skipped.size() == 15);
  CHECK(result.cells.size() >= 13);
}

TEST_CASE("run_study is deterministic and thread-count independent") {
  auto study = tiny_study(17);
  const std::vector<Method> methods = {Method::individualized, Method::generic,
                                       Method::personalized_sda};
  auto a = run_study(study, methods, {ModelKind::logreg}, {Task::arousal},
                     quick_spec(), quick_acfg(), 5, 1);
  auto b = run_study(study, methods, {ModelKind::logreg}, {Task::arousal},
                     quick_spec(), quick_acfg(), 5, 4);
  REQUIRE(a.cells.size() == b.cells.size());
  auto ita = a.cells.begin();
  auto itb = b.cells.begin();
  for (; ita != a.cells.end(); ++ita, ++itb) {
    CHECK(ita->first == itb->first);
    CHECK(ita->second.auroc_value == itb->second.auroc_value);
    CHECK(ita->second.f1_positive == itb->second.f1_positive);
    CHECK(ita->second.f1_negative == itb->second.f1_negative);
  }
}

TEST_CASE("knn with s-DA is recorded as skipped, not fatal") {
  auto study = tiny_study(19);
  auto result = run_study(study, {Method::personalized_sda}, {ModelKind::knn},
                          {Task::arousal}, quick_spec(ModelKind::knn),
                          quick_acfg(), 1);
  CHECK(result.cells.empty());
  CHECK(!result.skipped.empty());
  for (const auto& s : result.skipped)
    CHECK(s.reason.find("UnweightableModelKind") != std::string::npos);
}

TEST_CASE("results serialization round trips through the CSV") {
  auto study = tiny_study(23);
  auto result = run_study(study, {Method::individualized, Method::generic},
                          {ModelKind::logreg}, {Task::arousal}, quick_spec(),
                          quick_acfg(), 3);
  REQUIRE(!result.cells.empty());
  const auto dir =
      std::filesystem::temp_directory_path() / "longadapt_tests" / "proto_csv";
  std::filesystem::create_directories(dir);
  write_results_csv(result, (dir / "results.csv").string());
  write_roc_files(result, (dir / "roc").string());
  const std::string js = results_to_json(result);
  CHECK(js.find("\"cells\"") != std::string::npos);

  std::ifstream in(dir / "results.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "round,participant,test_session,method,kind,task,auroc,f1_pos,f1_neg,n,alpha");
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) ++lines;
  CHECK(lines == result.cells.size());
}
