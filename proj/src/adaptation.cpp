#include "longadapt/adaptation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <json.hpp>

#include "longadapt/analysis.hpp"

using nlohmann::json;

namespace longadapt {

void AdaptationConfig::validate() const {
  if (alpha_grid.empty())
    throw Error(Errc::config_error, "alpha grid is empty");
  std::set<double> seen;
  double prev = -1.0;
  for (double a : alpha_grid) {
    if (a < 0.0 || a > 1.0)
      throw Error(Errc::config_error, "alpha outside [0,1]");
    if (a <= prev)
      throw Error(Errc::config_error, "alpha grid must be sorted and distinct");
    prev = a;
  }
  if (cv_folds < 1) throw Error(Errc::config_error, "cv_folds must be >= 1");
}

InstanceWeights reweight(std::size_t n_target, std::size_t n_source,
                         double alpha) {
  if (n_target == 0 && n_source == 0)
    throw Error(Errc::empty_both_domains, "reweight");
  if (alpha < 0.0 || alpha > 1.0)
    throw Error(Errc::config_error, "alpha outside [0,1]");
  const double total = static_cast<double>(n_target + n_source);
  InstanceWeights w;
  if (n_target > 0) w.target_weight = alpha / n_target * total;
  if (n_source > 0) w.source_weight = (1.0 - alpha) / n_source * total;
  return w;
}

namespace {

WeightedDataset mix(const Dataset& target, const Dataset& source, double alpha) {
  const auto w = reweight(target.size(), source.size(), alpha);
  WeightedDataset out;
  out.x.reserve(target.size() + source.size());
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

// fold id per target instance
std::vector<int> assign_folds(const Dataset& target, const AdaptationConfig& cfg) {
  const std::size_t n = target.size();
  std::vector<int> fold(n);
  if (cfg.fold_strategy == FoldStrategy::contiguous) {
    for (std::size_t i = 0; i < n; ++i)
      fold[i] = static_cast<int>(i * cfg.cv_folds / n);
  } else {
    // stratified by label, deterministic shuffle within each class
    Rng rng(hash_combine(cfg.seed, 0x666f6c64ULL));
    for (int cls : {0, 1}) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < n; ++i)
        if (target.y[i] == cls) idx.push_back(i);
      for (std::size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[rng.next_below(i)]);
      for (std::size_t j = 0; j < idx.size(); ++j)
        fold[idx[j]] = static_cast<int>(j % cfg.cv_folds);
    }
  }
  return fold;
}

double fold_metric(const TrainedModel& model, const Dataset& held,
                   SelectionMetric metric) {
  std::vector<double> scores;
  scores.reserve(held.size());
  for (const auto& x : held.x) scores.push_back(model.predict_score(x));
  if (metric == SelectionMetric::auroc) return auroc(scores, held.y);
  double wrong = 0.0;
  for (std::size_t i = 0; i < held.size(); ++i)
    if ((scores[i] >= 0.5 ? 1 : 0) != held.y[i]) wrong += 1.0;
  return 1.0 - wrong / held.size();  // higher is better for both metrics
}

}  // namespace

AlphaSearchResult select_alpha(const Dataset& source, const Dataset& target,
                               const ModelSpec& spec,
                               const AdaptationConfig& cfg) {
  cfg.validate();
  if (spec.kind == ModelKind::knn)
    throw Error(Errc::unweightable_model_kind,
                "knn does not support continuous sample weights");
  if (target.size() < static_cast<std::size_t>(cfg.cv_folds))
    throw Error(Errc::too_few_target_instances,
                "target smaller than cv_folds");
  {
    bool has0 = false, has1 = false;
    for (int y : target.y) (y ? has1 : has0) = true;
    if (!has0 || !has1)
      throw Error(Errc::single_class_target, "target has a single class");
  }

  const auto fold = assign_folds(target, cfg);
  // folds whose held-out part lacks both classes are skipped for all alphas
  std::vector<int> usable;
  for (int f = 0; f < cfg.cv_folds; ++f) {
    bool has0 = false, has1 = false;
    for (std::size_t i = 0; i < target.size(); ++i)
      if (fold[i] == f) (target.y[i] ? has1 : has0) = true;
    if (has0 && has1) usable.push_back(f);
  }
  if (usable.empty())
    throw Error(Errc::single_class_target, "every fold is single-class");

  AlphaSearchResult res;
  res.alpha_grid = cfg.alpha_grid;
  res.folds = static_cast<int>(usable.size());
  res.metric_name =
      cfg.selection_metric == SelectionMetric::auroc ? "auroc" : "accuracy";

  double best_mean = -1.0;
  for (double alpha : cfg.alpha_grid) {
    std::vector<double> metrics;
    for (int f : usable) {
      Dataset fit, held;
      for (std::size_t i = 0; i < target.size(); ++i) {
        auto& dst = fold[i] == f ? held : fit;
        dst.x.push_back(target.x[i]);
        dst.y.push_back(target.y[i]);
      }
      ModelSpec fold_spec = spec;
      fold_spec.seed = hash_combine(spec.seed, static_cast<uint64_t>(f));
      auto model = train_classifier(fold_spec, mix(fit, source, alpha));
      metrics.push_back(fold_metric(*model, held, cfg.selection_metric));
    }
    const double n = static_cast<double>(metrics.size());
    const double mean =
        std::accumulate(metrics.begin(), metrics.end(), 0.0) / n;
    double var = 0.0;
    for (double m : metrics) var += (m - mean) * (m - mean);
    res.metric_mean.push_back(mean);
    res.metric_std.push_back(std::sqrt(var / n));
    if (mean >= best_mean) {  // ties break toward larger alpha
      best_mean = mean;
      res.chosen_alpha = alpha;
    }
  }
  return res;
}

std::string AlphaSearchResult::to_json() const {
  json j;
  j["alpha_grid"] = alpha_grid;
  j["metric_mean"] = metric_mean;
  j["metric_std"] = metric_std;
  j["chosen_alpha"] = chosen_alpha;
  j["folds"] = folds;
  j["metric_name"] = metric_name;
  return j.dump();
}

std::pair<std::unique_ptr<TrainedModel>, AlphaSearchResult> train_personalized(
    const Dataset& source, const std::vector<Dataset>& target_sessions,
    const ModelSpec& spec, const AdaptationConfig& cfg) {
  Dataset target;
  for (const auto& s : target_sessions) {
    target.x.insert(target.x.end(), s.x.begin(), s.x.end());
    target.y.insert(target.y.end(), s.y.begin(), s.y.end());
  }
  auto search = select_alpha(source, target, spec, cfg);
  auto model =
      train_classifier(spec, mix(target, source, search.chosen_alpha));
  return {std::move(model), std::move(search)};
}

namespace {

Eigen::MatrixXd to_eigen(const RowMatrix& m) {
  if (m.empty()) throw Error(Errc::dimension_mismatch, "empty matrix");
  Eigen::MatrixXd out(m.size(), m[0].size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i].size() != m[0].size())
      throw Error(Errc::dimension_mismatch, "ragged matrix");
    for (std::size_t j = 0; j < m[i].size(); ++j) {
      if (!std::isfinite(m[i][j]))
        throw Error(Errc::degenerate_covariance, "non-finite input");
      out(i, j) = m[i][j];
    }
  }
  return out;
}

Eigen::MatrixXd covariance(const Eigen::MatrixXd& x) {
  Eigen::RowVectorXd mean = x.colwise().mean();
  Eigen::MatrixXd centered = x.rowwise() - mean;
  return centered.transpose() * centered / static_cast<double>(x.rows() - 1);
}

// symmetric matrix power via eigendecomposition, eigenvalues clamped at 0
Eigen::MatrixXd sym_pow(const Eigen::MatrixXd& m, double exponent) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  Eigen::VectorXd powered(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    powered(i) = std::pow(ev(i), exponent);
  return es.eigenvectors() * powered.asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace

RowMatrix coral_align(const RowMatrix& source_x, const RowMatrix& target_x,
                      double ridge) {
  Eigen::MatrixXd src = to_eigen(source_x);
  Eigen::MatrixXd tgt = to_eigen(target_x);
  if (src.cols() != tgt.cols())
    throw Error(Errc::dimension_mismatch, "column counts differ");
  if (src.rows() < 2 || tgt.rows() < 2)
    throw Error(Errc::degenerate_covariance, "need >= 2 rows per domain");

  const Eigen::MatrixXd id =
      Eigen::MatrixXd::Identity(src.cols(), src.cols());
  Eigen::MatrixXd cs = covariance(src) + ridge * id;
  Eigen::MatrixXd ct = covariance(tgt) + ridge * id;
  Eigen::MatrixXd aligned = src * sym_pow(cs, -0.5) * sym_pow(ct, 0.5);

  RowMatrix out(aligned.rows(), std::vector<double>(aligned.cols()));
  for (Eigen::Index i = 0; i < aligned.rows(); ++i)
    for (Eigen::Index j = 0; j < aligned.cols(); ++j)
      out[i][j] = aligned(i, j);
  return out;
}

std::unique_ptr<TrainedModel> train_personalized_uda(const Dataset& source,
                                                     const RowMatrix& target_x,
                                                     const ModelSpec& spec,
                                                     double ridge) {
  RowMatrix aligned = coral_align(source.x, target_x, ridge);
  WeightedDataset data;
  data.x = std::move(aligned);
  data.y = source.y;
  data.w.assign(source.size(), 1.0);
  return train_classifier(spec, data);
}

}  // namespace longadapt
