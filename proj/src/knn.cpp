#include <algorithm>

#include "classifiers_impl.hpp"
#include "longadapt/kernels.hpp"

namespace longadapt::detail {

double KnnModel::predict_score(const std::vector<double>& f) const {
  if (f.size() != dim()) throw Error(Errc::dimension_mismatch, "knn predict");
  const std::size_t n = x.size();
  const std::size_t k = std::min<std::size_t>(params.k, n);
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    dist.emplace_back(kernels::squared_distance(f.data(), x[i].data(), f.size()),
                      i);
  // index as tie-break keeps the vote deterministic
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
  double wsum = 0.0, vote = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t i = dist[j].second;
    wsum += w[i];
    vote += w[i] * y[i];
  }
  return wsum > 0.0 ? vote / wsum : 0.5;
}

std::unique_ptr<KnnModel> train_knn(const KnnParams& p, const PreparedData& d) {
  auto model = std::make_unique<KnnModel>();
  model->params = p;
  model->x = d.x;
  model->y = d.y;
  model->w = d.w;
  return model;
}

}  // namespace longadapt::detail
