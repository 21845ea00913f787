#pragma once

#include <memory>
#include <string>
#include <vector>

#include "longadapt/classifiers.hpp"

namespace longadapt {

enum class FoldStrategy { contiguous, stratified_random };
enum class SelectionMetric { auroc, error };

struct AdaptationConfig {
  std::vector<double> alpha_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                    0.6, 0.7, 0.8, 0.9, 1.0};
  int cv_folds = 5;
  FoldStrategy fold_strategy = FoldStrategy::contiguous;
  SelectionMetric selection_metric = SelectionMetric::auroc;
  uint64_t seed = 0;

  void validate() const;
};

struct InstanceWeights {
  double target_weight = 0.0;  // per target instance
  double source_weight = 0.0;  // per source instance
};

// Raw weights alpha/n_target and (1-alpha)/n_source, rescaled by
// (n_target + n_source) so total mass equals total instance count.
InstanceWeights reweight(std::size_t n_target, std::size_t n_source,
                         double alpha);

struct Dataset {
  std::vector<std::vector<double>> x;
  std::vector<int> y;

  std::size_t size() const { return x.size(); }
};

struct AlphaSearchResult {
  std::vector<double> alpha_grid;
  std::vector<double> metric_mean;
  std::vector<double> metric_std;
  double chosen_alpha = 1.0;
  int folds = 0;
  std::string metric_name;

  std::string to_json() const;
};

AlphaSearchResult select_alpha(const Dataset& source, const Dataset& target,
                               const ModelSpec& spec,
                               const AdaptationConfig& cfg);

// Pools the target sessions, picks alpha by CV, retrains on everything.
std::pair<std::unique_ptr<TrainedModel>, AlphaSearchResult> train_personalized(
    const Dataset& source, const std::vector<Dataset>& target_sessions,
    const ModelSpec& spec, const AdaptationConfig& cfg);

using RowMatrix = std::vector<std::vector<double>>;

// Source features whitened by cov(source)+ridge*I and re-colored by
// cov(target)+ridge*I (symmetric eigendecomposition square roots).
RowMatrix coral_align(const RowMatrix& source_x, const RowMatrix& target_x,
                      double ridge = 1.0);

std::unique_ptr<TrainedModel> train_personalized_uda(const Dataset& source,
                                                     const RowMatrix& target_x,
                                                     const ModelSpec& spec,
                                                     double ridge = 1.0);

}  // namespace longadapt
