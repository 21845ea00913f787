#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "longadapt/preprocess.hpp"

using namespace longadapt;

namespace {

FeatureSchema schema_cd() {
  FeatureSchema s;
  s.columns = {{"v0", Modality::visual, ColumnKind::continuous},
               {"g0", Modality::game, ColumnKind::discrete}};
  return s;
}

// frames at 1 Hz, all labels positive, v0 = t, g0 cycling
SessionData session_1hz(int n_frames) {
  SessionData s;
  s.participant_id = "P1";
  s.session_index = 1;
  for (int i = 0; i < n_frames; ++i) {
    FrameRecord f;
    f.timestamp = i;
    f.arousal = Label::positive;
    f.valence = Label::positive;
    f.values = {static_cast<double>(i), static_cast<double>(i % 2)};
    s.frames.push_back(f);
  }
  return s;
}

}  // namespace

TEST_CASE("window counts follow floor((D - window)/shift) + 1") {
  WindowConfig cfg;  // 3s window, 1s shift
  const auto schema = schema_cd();
  // D = n_frames seconds at 1 Hz
  const int expected[] = {0, 0, 0, 1, 2, 0, 0, 0, 0, 0, 8};
  for (int d : {2, 3, 4, 10}) {
    auto w = window_features(session_1hz(d), cfg, schema, 1.0);
    CHECK(static_cast<int>(w.size()) == expected[d]);
  }
  // starts 0..7 for the 10-frame session
  auto w = window_features(session_1hz(10), cfg, schema, 1.0);
  REQUIRE(w.size() == 8);
  for (int i = 0; i < 8; ++i) CHECK(w[i].window_start == doctest::Approx(i));
}

TEST_CASE("window aggregation values") {
  WindowConfig cfg;
  FeatureSchema schema;
  schema.columns = {{"g0", Modality::game, ColumnKind::discrete}};
  SessionData s;
  s.participant_id = "P1";
  s.session_index = 1;
  const double vals[] = {1, 1, 2};
  for (int i = 0; i < 3; ++i) {
    FrameRecord f;
    f.timestamp = i;
    f.arousal = Label::positive;
    f.valence = Label::positive;
    f.values = {vals[i]};
    s.frames.push_back(f);
  }
  auto w = window_features(s, cfg, schema, 1.0);
  REQUIRE(w.size() == 1);
  // discrete column: mean 4/3, changed-flag 1, then presence for game
  REQUIRE(w[0].features.size() == 3);
  CHECK(w[0].features[0] == doctest::Approx(4.0 / 3.0));
  CHECK(w[0].features[1] == 1.0);
  CHECK(w[0].features[2] == 1.0);
}

TEST_CASE("continuous mean/variance and missing handling") {
  WindowConfig cfg;
  FeatureSchema schema;
  schema.columns = {{"v0", Modality::visual, ColumnKind::continuous}};
  SessionData s;
  double vals[] = {1.0, 3.0, missing_value()};
  for (int i = 0; i < 3; ++i) {
    FrameRecord f;
    f.timestamp = i;
    f.arousal = Label::positive;
    f.valence = Label::positive;
    f.values = {vals[i]};
    s.frames.push_back(f);
  }
  auto w = window_features(s, cfg, schema, 1.0);
  REQUIRE(w.size() == 1);
  // mean/variance over non-missing values (1,3): mean 2, population var 1
  CHECK(w[0].features[0] == doctest::Approx(2.0));
  CHECK(w[0].features[1] == doctest::Approx(1.0));
  // presence fraction 2/3
  CHECK(w[0].features[2] == doctest::Approx(2.0 / 3.0));

  // all-missing column -> mean/var 0, presence 0
  for (auto& f : s.frames) f.values[0] = missing_value();
  auto w2 = window_features(s, cfg, schema, 1.0);
  REQUIRE(w2.size() == 1);
  CHECK(w2[0].features[0] == 0.0);
  CHECK(w2[0].features[1] == 0.0);
  CHECK(w2[0].features[2] == 0.0);
}

TEST_CASE("no missing sentinel survives preprocessing") {
  WindowConfig cfg;
  const auto schema = schema_cd();
  auto s = session_1hz(30);
  for (std::size_t i = 0; i < s.frames.size(); i += 3)
    s.frames[i].values[0] = missing_value();
  for (const auto& w : window_features(s, cfg, schema, 1.0))
    for (double v : w.features) CHECK(std::isfinite(v));
}

TEST_CASE("window_label majority, tie, and drop rules") {
  WindowConfig cfg;
  using L = Label;
  CHECK(window_label({L::positive, L::positive, L::negative}, cfg) == 1);
  CHECK(window_label({L::positive, L::negative}, cfg) == 0);  // tie -> negative
  CHECK_FALSE(
      window_label({L::positive, L::excluded, L::excluded}, cfg).has_value());
  CHECK(window_label({L::positive, L::positive, L::excluded}, cfg) == 1);
  CHECK(window_label({L::negative, L::negative, L::negative}, cfg) == 0);
}

TEST_CASE("feature naming and count") {
  const auto schema = schema_cd();
  CHECK(window_feature_count(schema) == 2 * 2 + 2);
  const auto names = window_feature_names(schema);
  CHECK(names == std::vector<std::string>{"v0__mean", "v0__var", "g0__mean",
                                          "g0__chg", "presence__visual",
                                          "presence__game"});
}

TEST_CASE("standardizer fit and apply") {
  std::vector<WindowInstance> train(2);
  train[0].features = {1.0, 5.0};
  train[1].features = {3.0, 5.0};
  auto st = fit_standardizer(train);
  CHECK(st.mean[0] == doctest::Approx(2.0));
  CHECK(st.sd[0] == doctest::Approx(1.0));
  CHECK(st.mask[0] == 0);
  CHECK(st.mask[1] == 1);  // constant feature masked

  CHECK(apply_standardizer(st, std::vector<double>{3.0, 5.0}) ==
        std::vector<double>{1.0, 0.0});

  // applying to the train set gives mean 0, variance 1 on non-masked features
  auto out = apply_standardizer(st, train);
  double m = (out[0].features[0] + out[1].features[0]) / 2;
  CHECK(m == doctest::Approx(0.0));
  double var = (out[0].features[0] * out[0].features[0] +
                out[1].features[0] * out[1].features[0]) /
               2;
  CHECK(var == doctest::Approx(1.0));

  // standardize-then-standardize with a refit is idempotent
  auto st2 = fit_standardizer(out);
  auto out2 = apply_standardizer(st2, out);
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < out[i].features.size(); ++j)
      CHECK(out2[i].features[j] ==
            doctest::Approx(out[i].features[j]).epsilon(1e-9));

  CHECK_THROWS_AS(fit_standardizer({}), Error);
  CHECK_THROWS_AS(apply_standardizer(st, std::vector<double>{1.0}), Error);
}

TEST_CASE("windowing is invariant to ingest order after re-sorting") {
  WindowConfig cfg;
  const auto schema = schema_cd();
  auto s = session_1hz(15);
  auto shuffled = s;
  std::reverse(shuffled.frames.begin(), shuffled.frames.end());
  std::sort(shuffled.frames.begin(), shuffled.frames.end(),
            [](const FrameRecord& a, const FrameRecord& b) {
              return a.timestamp < b.timestamp;
            });
  auto w1 = window_features(s, cfg, schema, 1.0);
  auto w2 = window_features(shuffled, cfg, schema, 1.0);
  REQUIRE(w1.size() == w2.size());
  for (std::size_t i = 0; i < w1.size(); ++i)
    CHECK(w1[i].features == w2[i].features);
}
