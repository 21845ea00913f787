#include <Eigen/Dense>

#include "classifiers_impl.hpp"
#include "longadapt/kernels.hpp"

namespace longadapt::detail {

double LinearModel::margin(const std::vector<double>& f) const {
  return kernels::dot(beta.data(), f.data(), beta.size()) + intercept;
}

double LinearModel::predict_score(const std::vector<double>& f) const {
  if (f.size() != beta.size())
    throw Error(Errc::dimension_mismatch, "linear predict");
  return sigmoid(margin(f));
}

// Weighted L2 logistic regression by damped Newton iteration. Weights are
// pre-normalized to total mass 1, so the penalty (l2/2)*|beta|^2 makes the
// objective invariant to uniform weight rescaling.
std::unique_ptr<LinearModel> train_logreg(const LogregParams& p,
                                          const PreparedData& d) {
  const std::size_t n = d.x.size();
  const std::size_t dim = d.dim;
  Eigen::MatrixXd x(n, dim + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < dim; ++j) x(i, j) = d.x[i][j];
    x(i, dim) = 1.0;
  }
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(dim + 1);
  Eigen::VectorXd grad(dim + 1);
  Eigen::MatrixXd hess(dim + 1, dim + 1);

  for (int it = 0; it < p.max_iter; ++it) {
    Eigen::VectorXd m = x * beta;
    grad.setZero();
    hess.setZero();
    Eigen::VectorXd r(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double pr = sigmoid(m(i));
      grad.noalias() += d.w[i] * (pr - d.y[i]) * x.row(i).transpose();
      r(i) = d.w[i] * pr * (1.0 - pr);
    }
    for (std::size_t j = 0; j < dim; ++j) grad(j) += p.l2 * beta(j);
    hess.noalias() = x.transpose() * r.asDiagonal() * x;
    for (std::size_t j = 0; j < dim; ++j) hess(j, j) += p.l2;
    hess.diagonal().array() += 1e-12;
    Eigen::VectorXd step = hess.ldlt().solve(grad);
    beta -= step;
    if (grad.norm() < p.tol) break;
  }

  auto model = std::make_unique<LinearModel>();
  model->kind_ = ModelKind::logreg;
  model->beta.assign(beta.data(), beta.data() + dim);
  model->intercept = beta(dim);
  return model;
}

// Weighted hinge loss with L2 (strength 1/c), full-batch subgradient
// descent with a 1/sqrt(t) step schedule; the score is the logistic link
// of the final margin.
std::unique_ptr<LinearModel> train_svm(const SvmParams& p,
                                       const PreparedData& d) {
  const std::size_t n = d.x.size();
  const std::size_t dim = d.dim;
  std::vector<double> beta(dim, 0.0);
  double intercept = 0.0;
  std::vector<double> grad(dim);

  for (int it = 0; it < p.iters; ++it) {
    for (std::size_t j = 0; j < dim; ++j) grad[j] = beta[j] / p.c;
    double gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ysgn = d.y[i] ? 1.0 : -1.0;
      const double m =
          kernels::dot(beta.data(), d.x[i].data(), dim) + intercept;
      if (ysgn * m < 1.0) {
        const double coef = -d.w[i] * ysgn;
        kernels::axpy(coef, d.x[i].data(), grad.data(), dim);
        gb += coef;
      }
    }
    const double eta = p.step / std::sqrt(it + 1.0);
    kernels::axpy(-eta, grad.data(), beta.data(), dim);
    intercept -= eta * gb;
  }

  auto model = std::make_unique<LinearModel>();
  model->kind_ = ModelKind::linear_svm;
  model->beta = std::move(beta);
  model->intercept = intercept;
  return model;
}

}  // namespace longadapt::detail
