#pragma once

#include <memory>
#include <string>
#include <vector>

#include "longadapt/common.hpp"

namespace longadapt {

enum class ModelKind { gbdt, logreg, linear_svm, knn, mlp };

const char* model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& s);

struct GbdtParams {
  int rounds = 100;
  int max_depth = 6;
  double learning_rate = 0.3;
  double l2 = 1.0;
  // Threshold on a child's weight-normalized hessian mass. The objective
  // normalizes sample weights to total mass 1, so the classic count-like
  // default of 1 would forbid every split; 0 keeps all splits admissible.
  double min_child_weight = 0.0;
};

struct LogregParams {
  double l2 = 1.0;
  int max_iter = 200;
  double tol = 1e-10;
};

struct SvmParams {
  double c = 1.0;
  int iters = 500;
  double step = 0.5;
};

struct KnnParams {
  int k = 5;
};

struct MlpParams {
  int hidden = 64;
  int epochs = 50;
  double step = 1e-3;
};

struct ModelSpec {
  ModelKind kind = ModelKind::gbdt;
  GbdtParams gbdt;
  LogregParams logreg;
  SvmParams svm;
  KnnParams knn;
  MlpParams mlp;
  uint64_t seed = 0;

  void validate() const;
};

struct WeightedDataset {
  std::vector<std::vector<double>> x;
  std::vector<int> y;        // 0/1
  std::vector<double> w;     // non-negative, finite

  std::size_t size() const { return x.size(); }
  std::size_t dim() const { return x.empty() ? 0 : x[0].size(); }
};

class TrainedModel {
 public:
  virtual ~TrainedModel() = default;
  virtual ModelKind kind() const = 0;
  virtual std::size_t dim() const = 0;
  // finite score in [0, 1]; deterministic
  virtual double predict_score(const std::vector<double>& features) const = 0;
  virtual std::string to_json() const = 0;
};

std::unique_ptr<TrainedModel> train_classifier(const ModelSpec& spec,
                                               const WeightedDataset& data);
std::unique_ptr<TrainedModel> model_from_json(const std::string& text);

int predict_label(const TrainedModel& model, const std::vector<double>& features,
                  double threshold = 0.5);

// Split gain G_L^2/(H_L+l2) + G_R^2/(H_R+l2) - G^2/(H+l2) with raw weighted
// logistic gradients/hessians at prediction 0.5 (margin 0). Exposed so the
// boosting math can be checked in isolation.
double gbdt_root_gain(const WeightedDataset& data, std::size_t feature,
                      double threshold, double l2);

}  // namespace longadapt
