#pragma once

#include <cmath>
#include <vector>

#include <json.hpp>

#include "longadapt/classifiers.hpp"

namespace longadapt::detail {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// dataset after zero-weight drop and weight normalization (total mass 1)
struct PreparedData {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  std::vector<double> w;
  std::size_t dim = 0;
};

struct GbdtNode {
  int feature = -1;       // -1 marks a leaf
  double threshold = 0.0; // x[feature] < threshold goes left
  int left = -1;
  int right = -1;
  double value = 0.0;     // leaf value, learning rate already applied
};

class GbdtModel final : public TrainedModel {
 public:
  GbdtParams params;
  std::size_t dim_ = 0;
  std::vector<std::vector<GbdtNode>> trees;

  ModelKind kind() const override { return ModelKind::gbdt; }
  std::size_t dim() const override { return dim_; }
  double margin(const std::vector<double>& f) const;
  double predict_score(const std::vector<double>& f) const override;
  std::string to_json() const override;
};

class LinearModel final : public TrainedModel {
 public:
  ModelKind kind_ = ModelKind::logreg;  // logreg or linear_svm
  std::vector<double> beta;
  double intercept = 0.0;

  ModelKind kind() const override { return kind_; }
  std::size_t dim() const override { return beta.size(); }
  double margin(const std::vector<double>& f) const;
  double predict_score(const std::vector<double>& f) const override;
  std::string to_json() const override;
};

class KnnModel final : public TrainedModel {
 public:
  KnnParams params;
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  std::vector<double> w;

  ModelKind kind() const override { return ModelKind::knn; }
  std::size_t dim() const override { return x.empty() ? 0 : x[0].size(); }
  double predict_score(const std::vector<double>& f) const override;
  std::string to_json() const override;
};

class MlpModel final : public TrainedModel {
 public:
  MlpParams params;
  std::size_t dim_ = 0;
  // row-major [hidden x dim]
  std::vector<double> w1, b1, w2;
  double b2 = 0.0;

  ModelKind kind() const override { return ModelKind::mlp; }
  std::size_t dim() const override { return dim_; }
  double margin(const std::vector<double>& f) const;
  double predict_score(const std::vector<double>& f) const override;
  std::string to_json() const override;
};

std::unique_ptr<GbdtModel> train_gbdt(const GbdtParams& p, const PreparedData& d);
std::unique_ptr<LinearModel> train_logreg(const LogregParams& p,
                                          const PreparedData& d);
std::unique_ptr<LinearModel> train_svm(const SvmParams& p, const PreparedData& d);
std::unique_ptr<KnnModel> train_knn(const KnnParams& p, const PreparedData& d);
std::unique_ptr<MlpModel> train_mlp(const MlpParams& p, const PreparedData& d,
                                    uint64_t seed);

}  // namespace longadapt::detail
