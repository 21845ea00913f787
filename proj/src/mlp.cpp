#include <cmath>

#include "classifiers_impl.hpp"
#include "longadapt/kernels.hpp"

namespace longadapt::detail {

double MlpModel::margin(const std::vector<double>& f) const {
  const int hidden = params.hidden;
  double out = b2;
  for (int u = 0; u < hidden; ++u) {
    const double a =
        std::tanh(kernels::dot(&w1[u * dim_], f.data(), dim_) + b1[u]);
    out += w2[u] * a;
  }
  return out;
}

double MlpModel::predict_score(const std::vector<double>& f) const {
  if (f.size() != dim_) throw Error(Errc::dimension_mismatch, "mlp predict");
  return sigmoid(margin(f));
}

// One tanh hidden layer trained with full-batch Adam on the weighted
// cross-entropy (weights pre-normalized to total mass 1). Fixed epoch
// budget; all randomness comes from the seeded init.
std::unique_ptr<MlpModel> train_mlp(const MlpParams& p, const PreparedData& d,
                                    uint64_t seed) {
  const std::size_t n = d.x.size();
  const std::size_t dim = d.dim;
  const int hidden = p.hidden;

  auto model = std::make_unique<MlpModel>();
  model->params = p;
  model->dim_ = dim;
  Rng rng(hash_combine(seed, 0x6d6c70ULL));
  const double s1 = 1.0 / std::sqrt(static_cast<double>(dim));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  model->w1.resize(hidden * dim);
  model->b1.assign(hidden, 0.0);
  model->w2.resize(hidden);
  for (auto& v : model->w1) v = s1 * rng.normal();
  for (auto& v : model->w2) v = s2 * rng.normal();

  const std::size_t np = model->w1.size() + model->b1.size() +
                         model->w2.size() + 1;
  std::vector<double> grad(np), m1(np, 0.0), m2(np, 0.0);
  std::vector<double> act(hidden);
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  for (int epoch = 0; epoch < p.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double* gw1 = grad.data();
    double* gb1 = gw1 + model->w1.size();
    double* gw2 = gb1 + hidden;
    double* gb2 = gw2 + hidden;
    for (std::size_t i = 0; i < n; ++i) {
      double out = model->b2;
      for (int u = 0; u < hidden; ++u) {
        act[u] = std::tanh(
            kernels::dot(&model->w1[u * dim], d.x[i].data(), dim) +
            model->b1[u]);
        out += model->w2[u] * act[u];
      }
      const double delta = d.w[i] * (sigmoid(out) - d.y[i]);
      *gb2 += delta;
      for (int u = 0; u < hidden; ++u) {
        gw2[u] += delta * act[u];
        const double du = delta * model->w2[u] * (1.0 - act[u] * act[u]);
        gb1[u] += du;
        kernels::axpy(du, d.x[i].data(), &gw1[u * dim], dim);
      }
    }
    const double t = epoch + 1.0;
    const double corr =
        p.step * std::sqrt(1.0 - std::pow(beta2, t)) / (1.0 - std::pow(beta1, t));
    auto adam = [&](double* param, std::size_t off, std::size_t count) {
      for (std::size_t j = 0; j < count; ++j) {
        const std::size_t k = off + j;
        m1[k] = beta1 * m1[k] + (1.0 - beta1) * grad[k];
        m2[k] = beta2 * m2[k] + (1.0 - beta2) * grad[k] * grad[k];
        param[j] -= corr * m1[k] / (std::sqrt(m2[k]) + eps);
      }
    };
    std::size_t off = 0;
    adam(model->w1.data(), off, model->w1.size());
    off += model->w1.size();
    adam(model->b1.data(), off, hidden);
    off += hidden;
    adam(model->w2.data(), off, hidden);
    off += hidden;
    adam(&model->b2, off, 1);
  }
  return model;
}

}  // namespace longadapt::detail
