#include <doctest.h>

#include <cmath>
#include <vector>

#include "longadapt/adaptation.hpp"
#include "longadapt/analysis.hpp"
#include "longadapt/common.hpp"

using namespace longadapt;

namespace {

Dataset gaussian_dataset(Rng& rng, std::size_t n, double direction,
                         double offset = 0.0) {
  // 2-D blobs separated along (direction applied to x0)
  Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = rng.uniform() < 0.5 ? 0 : 1;
    const double sign = y ? 1.0 : -1.0;
    d.x.push_back({offset + sign * direction + 0.7 * rng.normal(),
                   0.7 * rng.normal()});
    d.y.push_back(y);
  }
  d.y[0] = 0;
  d.y[1] = 1;
  return d;
}

WeightedDataset mix_for_test(const Dataset& target, const Dataset& source,
                             double alpha) {
  const auto w = reweight(target.size(), source.size(), alpha);
  WeightedDataset out;
  for (std::size_t i = 0; i < target.size(); ++i) {
    out.x.push_back(target.x[i]);
    out.y.push_back(target.y[i]);
    out.w.push_back(w.target_weight);
  }
  for (std::size_t i = 0; i < source.size(); ++i) {
    out.x.push_back(source.x[i]);
    out.y.push_back(source.y[i]);
    out.w.push_back(w.source_weight);
  }
  return out;
}

}  // namespace

TEST_CASE("reweight endpoints and hand-computed middle") {
  auto w = reweight(4, 9, 1.0);
  CHECK(w.source_weight == 0.0);
  CHECK(w.target_weight * 4 == doctest::Approx(13.0));

  w = reweight(4, 9, 0.0);
  CHECK(w.target_weight == 0.0);
  CHECK(w.source_weight * 9 == doctest::Approx(13.0));

  // alpha 0.5, n_T 2, n_S 3: target 1.25 each, source 5/6 each, total 5
  w = reweight(2, 3, 0.5);
  CHECK(w.target_weight == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(w.source_weight == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(2 * w.target_weight + 3 * w.source_weight == doctest::Approx(5.0));

  CHECK_THROWS_AS(reweight(0, 0, 0.5), Error);
  CHECK_THROWS_AS(reweight(1, 1, 1.5), Error);
  // one empty domain puts all mass on the other
  w = reweight(0, 3, 0.25);
  CHECK(w.target_weight == 0.0);
}

TEST_CASE("weighted mean loss realizes the alpha mixture") {
  Rng rng(7);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n_t = 1 + rng.next_below(20);
    const std::size_t n_s = 1 + rng.next_below(40);
    const double alpha = rng.uniform();
    std::vector<double> loss_t(n_t), loss_s(n_s);
    for (auto& l : loss_t) l = rng.uniform();
    for (auto& l : loss_s) l = rng.uniform();
    const auto w = reweight(n_t, n_s, alpha);

    double weighted = 0.0, mass = 0.0;
    for (double l : loss_t) weighted += w.target_weight * l;
    for (double l : loss_s) weighted += w.source_weight * l;
    mass = n_t * w.target_weight + n_s * w.source_weight;

    double mean_t = 0.0, mean_s = 0.0;
    for (double l : loss_t) mean_t += l / n_t;
    for (double l : loss_s) mean_s += l / n_s;
    const double mixture = alpha * mean_t + (1.0 - alpha) * mean_s;

    // weighted sum = (n_t + n_s) * mixture; mass = n_t + n_s exactly
    CHECK(mass == doctest::Approx(static_cast<double>(n_t + n_s)).epsilon(1e-15));
    CHECK(weighted ==
          doctest::Approx(mixture * static_cast<double>(n_t + n_s)).epsilon(1e-12));
  }
}

TEST_CASE("alpha endpoints are bit-exact against unmixed training") {
  Rng rng(13);
  Dataset target = gaussian_dataset(rng, 30, 1.0);
  Dataset source = gaussian_dataset(rng, 60, 1.0, 0.5);

  for (ModelKind kind : {ModelKind::gbdt, ModelKind::logreg}) {
    ModelSpec spec;
    spec.kind = kind;
    spec.gbdt.rounds = 10;

    WeightedDataset target_only;
    target_only.x = target.x;
    target_only.y = target.y;
    target_only.w.assign(target.size(), 1.0);
    auto individualized = train_classifier(spec, target_only);

    WeightedDataset source_only;
    source_only.x = source.x;
    source_only.y = source.y;
    source_only.w.assign(source.size(), 1.0);
    auto generic = train_classifier(spec, source_only);

    auto at1 = train_classifier(spec, mix_for_test(target, source, 1.0));
    auto at0 = train_classifier(spec, mix_for_test(target, source, 0.0));

    for (const auto& x : target.x) {
      CHECK(at1->predict_score(x) == individualized->predict_score(x));
      CHECK(at0->predict_score(x) == generic->predict_score(x));
    }
  }
}

TEST_CASE("select_alpha prefers target when source is adversarial") {
  Rng rng(19);
  Dataset target = gaussian_dataset(rng, 60, 1.5);
  Dataset source = gaussian_dataset(rng, 120, 1.5);
  for (auto& y : source.y) y = 1 - y;  // flipped concept

  ModelSpec spec;
  spec.kind = ModelKind::logreg;
  AdaptationConfig cfg;
  auto res = select_alpha(source, target, spec, cfg);
  CHECK(res.chosen_alpha >= 0.8);
  CHECK(res.alpha_grid.size() == 11);
  CHECK(res.metric_mean.size() == 11);
}

TEST_CASE("select_alpha tie-breaks toward larger alpha") {
  // perfectly separable target and agreeing source: every alpha scores a
  // perfect CV accuracy, so the tie resolves to the last grid point
  Dataset target, source;
  Rng rng(23);
  for (int i = 0; i < 40; ++i) {
    const int y = i % 2;
    target.x.push_back({y ? 10.0 + rng.uniform() : -10.0 - rng.uniform()});
    target.y.push_back(y);
  }
  for (int i = 0; i < 40; ++i) {
    const int y = i % 2;
    source.x.push_back({y ? 10.0 + rng.uniform() : -10.0 - rng.uniform()});
    source.y.push_back(y);
  }
  ModelSpec spec;
  spec.kind = ModelKind::logreg;
  AdaptationConfig cfg;
  cfg.alpha_grid = {0.0, 0.5, 1.0};
  cfg.selection_metric = SelectionMetric::error;
  auto res = select_alpha(source, target, spec, cfg);
  for (double m : res.metric_mean) CHECK(m == doctest::Approx(1.0));
  CHECK(res.chosen_alpha == 1.0);
}

TEST_CASE("select_alpha error paths") {
  Rng rng(29);
  Dataset target = gaussian_dataset(rng, 20, 1.0);
  Dataset source = gaussian_dataset(rng, 20, 1.0);
  ModelSpec spec;
  AdaptationConfig cfg;

  spec.kind = ModelKind::knn;
  try {
    select_alpha(source, target, spec, cfg);
    FAIL("expected UnweightableModelKind");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unweightable_model_kind);
  }

  spec.kind = ModelKind::logreg;
  Dataset tiny;
  tiny.x = {{0.0}, {1.0}};
  tiny.y = {0, 1};
  try {
    select_alpha(source, tiny, spec, cfg);
    FAIL("expected TooFewTargetInstances");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::too_few_target_instances);
  }

  Dataset single = target;
  for (auto& y : single.y) y = 1;
  try {
    select_alpha(source, single, spec, cfg);
    FAIL("expected SingleClassTarget");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::single_class_target);
  }

  AdaptationConfig bad;
  bad.alpha_grid = {0.5, 0.2};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.alpha_grid = {0.2, 1.5};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("train_personalized endpoint grids match unmixed training") {
  Rng rng(31);
  Dataset s1 = gaussian_dataset(rng, 20, 1.0);
  Dataset s2 = gaussian_dataset(rng, 20, 1.0);
  Dataset source = gaussian_dataset(rng, 50, 1.0, 0.3);

  ModelSpec spec;
  spec.kind = ModelKind::logreg;
  AdaptationConfig cfg;

  cfg.alpha_grid = {1.0};
  auto [m1, r1] = train_personalized(source, {s1, s2}, spec, cfg);
  CHECK(r1.chosen_alpha == 1.0);

  Dataset pooled;
  pooled.x = s1.x;
  pooled.x.insert(pooled.x.end(), s2.x.begin(), s2.x.end());
  pooled.y = s1.y;
  pooled.y.insert(pooled.y.end(), s2.y.begin(), s2.y.end());
  WeightedDataset target_only;
  target_only.x = pooled.x;
  target_only.y = pooled.y;
  target_only.w.assign(pooled.size(), 1.0);
  auto individualized = train_classifier(spec, target_only);
  for (const auto& x : pooled.x)
    CHECK(m1->predict_score(x) == individualized->predict_score(x));

  cfg.alpha_grid = {0.0};
  auto [m0, r0] = train_personalized(source, {s1, s2}, spec, cfg);
  WeightedDataset source_only;
  source_only.x = source.x;
  source_only.y = source.y;
  source_only.w.assign(source.size(), 1.0);
  auto generic = train_classifier(spec, source_only);
  for (const auto& x : pooled.x)
    CHECK(m0->predict_score(x) == generic->predict_score(x));
}

TEST_CASE("coral_align identity and scaling") {
  Rng rng(37);
  RowMatrix src;
  for (int i = 0; i < 400; ++i)
    src.push_back({rng.normal(), 2.0 * rng.normal(), rng.normal() + 0.3});

  SUBCASE("target equal to source returns the input") {
    auto out = coral_align(src, src, 1.0);
    for (std::size_t i = 0; i < src.size(); ++i)
      for (std::size_t j = 0; j < 3; ++j)
        CHECK(out[i][j] == doctest::Approx(src[i][j]).epsilon(1e-8));
  }
  SUBCASE("column scaling is recovered in the small-ridge limit") {
    RowMatrix tgt;
    for (const auto& row : src)
      tgt.push_back({2 * row[0], 2 * row[1], 2 * row[2]});
    auto out = coral_align(src, tgt, 1e-6);
    for (std::size_t i = 0; i < src.size(); ++i)
      for (std::size_t j = 0; j < 3; ++j)
        CHECK(out[i][j] == doctest::Approx(2 * src[i][j]).epsilon(1e-3));
  }
}

TEST_CASE("coral_align matches covariances") {
  Rng rng(41);
  RowMatrix src, tgt;
  for (int i = 0; i < 500; ++i) {
    std::vector<double> a(5), b(5);
    for (int j = 0; j < 5; ++j) {
      a[j] = rng.normal() * (1.0 + 0.3 * j);
      b[j] = rng.normal() * (2.0 - 0.2 * j) + 0.5 * (j == 0 ? rng.normal() : 0);
    }
    // correlate target columns a bit
    b[1] += 0.5 * b[0];
    src.push_back(a);
    tgt.push_back(b);
  }
  const double ridge = 1e-8;
  auto out = coral_align(src, tgt, ridge);

  auto cov = [](const RowMatrix& m) {
    const std::size_t n = m.size(), d = m[0].size();
    std::vector<double> mean(d, 0.0);
    for (const auto& row : m)
      for (std::size_t j = 0; j < d; ++j) mean[j] += row[j] / n;
    std::vector<std::vector<double>> c(d, std::vector<double>(d, 0.0));
    for (const auto& row : m)
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k)
          c[j][k] += (row[j] - mean[j]) * (row[k] - mean[k]) / (n - 1);
    return c;
  };
  auto c_out = cov(out);
  auto c_tgt = cov(tgt);
  double frob = 0.0;
  for (int j = 0; j < 5; ++j)
    for (int k = 0; k < 5; ++k) {
      const double d = c_out[j][k] - c_tgt[j][k];
      frob += d * d;
    }
  CHECK(std::sqrt(frob) < 1e-6);
}

TEST_CASE("coral_align error paths") {
  RowMatrix a = {{1, 2}, {3, 4}};
  RowMatrix b = {{1, 2, 3}, {4, 5, 6}};
  CHECK_THROWS_AS(coral_align(a, b, 1.0), Error);
  RowMatrix one_row = {{1, 2}};
  CHECK_THROWS_AS(coral_align(a, one_row, 1.0), Error);
  RowMatrix bad = {{1, std::nan("")}, {3, 4}};
  try {
    coral_align(a, bad, 1.0);
    FAIL("expected DegenerateCovariance");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::degenerate_covariance);
  }
}

TEST_CASE("train_personalized_uda with identical domains matches generic") {
  Rng rng(43);
  Dataset source = gaussian_dataset(rng, 150, 1.2);
  ModelSpec spec;
  spec.kind = ModelKind::logreg;
  auto uda = train_personalized_uda(source, source.x, spec);

  WeightedDataset plain;
  plain.x = source.x;
  plain.y = source.y;
  plain.w.assign(source.size(), 1.0);
  auto generic = train_classifier(spec, plain);
  for (const auto& x : source.x)
    CHECK(uda->predict_score(x) ==
          doctest::Approx(generic->predict_score(x)).epsilon(1e-6));
}

TEST_CASE("uda recovers a pure second-order shift") {
  Rng rng(47);
  Dataset source = gaussian_dataset(rng, 300, 1.2);
  // target: same concept, but the pure-noise coordinate is inflated so the
  // generic model's residual weight on it wrecks the ranking
  Dataset target;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const auto& x = source.x[i];
    target.x.push_back({x[0], 50.0 * x[1]});
    target.y.push_back(source.y[i]);
  }
  ModelSpec spec;
  spec.kind = ModelKind::logreg;

  auto uda = train_personalized_uda(source, target.x, spec, 1e-6);
  WeightedDataset plain;
  plain.x = source.x;
  plain.y = source.y;
  plain.w.assign(source.size(), 1.0);
  auto generic = train_classifier(spec, plain);

  std::vector<double> s_uda, s_gen;
  for (const auto& x : target.x) {
    s_uda.push_back(uda->predict_score(x));
    s_gen.push_back(generic->predict_score(x));
  }
  CHECK(auroc(s_uda, target.y) > auroc(s_gen, target.y));
}
