#include "longadapt/classifiers.hpp"

#include <algorithm>
#include <cmath>

#include "classifiers_impl.hpp"

using nlohmann::json;

namespace longadapt {

const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::gbdt: return "gbdt";
    case ModelKind::logreg: return "logreg";
    case ModelKind::linear_svm: return "linear_svm";
    case ModelKind::knn: return "knn";
    case ModelKind::mlp: return "mlp";
  }
  return "?";
}

ModelKind model_kind_from_name(const std::string& s) {
  if (s == "gbdt") return ModelKind::gbdt;
  if (s == "logreg") return ModelKind::logreg;
  if (s == "linear_svm") return ModelKind::linear_svm;
  if (s == "knn") return ModelKind::knn;
  if (s == "mlp") return ModelKind::mlp;
  throw Error(Errc::parse_error, "unknown model kind '" + s + "'");
}

void ModelSpec::validate() const {
  if (gbdt.rounds < 1 || gbdt.max_depth < 1 || gbdt.learning_rate <= 0.0 ||
      gbdt.l2 < 0.0 || gbdt.min_child_weight < 0.0)
    throw Error(Errc::config_error, "gbdt hyperparameters out of range");
  if (logreg.l2 < 0.0 || logreg.max_iter < 1)
    throw Error(Errc::config_error, "logreg hyperparameters out of range");
  if (svm.c <= 0.0 || svm.iters < 1)
    throw Error(Errc::config_error, "svm hyperparameters out of range");
  if (knn.k < 1) throw Error(Errc::config_error, "knn k must be >= 1");
  if (mlp.hidden < 1 || mlp.epochs < 1 || mlp.step <= 0.0)
    throw Error(Errc::config_error, "mlp hyperparameters out of range");
}

namespace {

detail::PreparedData prepare(const WeightedDataset& data, bool needs_both_classes) {
  if (data.x.size() != data.y.size() || data.x.size() != data.w.size())
    throw Error(Errc::dimension_mismatch, "dataset field lengths differ");
  detail::PreparedData d;
  d.dim = data.dim();
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double w = data.w[i];
    if (!std::isfinite(w) || w < 0.0)
      throw Error(Errc::non_finite_feature, "bad sample weight");
    if (w == 0.0) continue;  // zero-weight instances never reach the fit
    if (data.x[i].size() != d.dim)
      throw Error(Errc::dimension_mismatch, "ragged feature rows");
    for (double v : data.x[i])
      if (!std::isfinite(v)) throw Error(Errc::non_finite_feature, "feature");
    d.x.push_back(data.x[i]);
    d.y.push_back(data.y[i]);
    d.w.push_back(w);
    total += w;
  }
  if (d.x.empty()) throw Error(Errc::empty_data, "no instances with weight > 0");
  if (needs_both_classes) {
    bool has0 = false, has1 = false;
    for (int y : d.y) (y ? has1 : has0) = true;
    if (!has0 || !has1)
      throw Error(Errc::single_class_data, "both classes required");
  }
  // total mass 1: duplication-exact and invariant to uniform rescaling
  const bool uniform =
      std::all_of(d.w.begin(), d.w.end(), [&](double w) { return w == d.w[0]; });
  if (uniform) {
    // equal weights normalize without rounding through the running total,
    // so alpha-endpoint training is bit-identical to unweighted training
    const double w = 1.0 / static_cast<double>(d.w.size());
    std::fill(d.w.begin(), d.w.end(), w);
  } else {
    for (double& w : d.w) w /= total;
  }
  return d;
}

}  // namespace

std::unique_ptr<TrainedModel> train_classifier(const ModelSpec& spec,
                                               const WeightedDataset& data) {
  spec.validate();
  auto d = prepare(data, spec.kind != ModelKind::knn);
  switch (spec.kind) {
    case ModelKind::gbdt: return detail::train_gbdt(spec.gbdt, d);
    case ModelKind::logreg: return detail::train_logreg(spec.logreg, d);
    case ModelKind::linear_svm: return detail::train_svm(spec.svm, d);
    case ModelKind::knn: return detail::train_knn(spec.knn, d);
    case ModelKind::mlp: return detail::train_mlp(spec.mlp, d, spec.seed);
  }
  throw Error(Errc::config_error, "unknown model kind");
}

int predict_label(const TrainedModel& model, const std::vector<double>& features,
                  double threshold) {
  return model.predict_score(features) >= threshold ? 1 : 0;
}

namespace detail {

std::string GbdtModel::to_json() const {
  json j;
  j["kind"] = "gbdt";
  j["dim"] = dim_;
  j["params"] = {{"rounds", params.rounds},
                 {"max_depth", params.max_depth},
                 {"learning_rate", params.learning_rate},
                 {"l2", params.l2},
                 {"min_child_weight", params.min_child_weight}};
  json jt = json::array();
  for (const auto& tree : trees) {
    json jn = json::array();
    for (const auto& n : tree)
      jn.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    jt.push_back(std::move(jn));
  }
  j["trees"] = std::move(jt);
  return j.dump();
}

std::string LinearModel::to_json() const {
  json j;
  j["kind"] = model_kind_name(kind_);
  j["beta"] = beta;
  j["intercept"] = intercept;
  return j.dump();
}

std::string KnnModel::to_json() const {
  json j;
  j["kind"] = "knn";
  j["k"] = params.k;
  j["x"] = x;
  j["y"] = y;
  j["w"] = w;
  return j.dump();
}

std::string MlpModel::to_json() const {
  json j;
  j["kind"] = "mlp";
  j["dim"] = dim_;
  j["hidden"] = params.hidden;
  j["w1"] = w1;
  j["b1"] = b1;
  j["w2"] = w2;
  j["b2"] = b2;
  return j.dump();
}

}  // namespace detail

std::unique_ptr<TrainedModel> model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, std::string("model json: ") + e.what());
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gbdt") {
    auto m = std::make_unique<detail::GbdtModel>();
    m->dim_ = j.at("dim").get<std::size_t>();
    const auto& p = j.at("params");
    m->params.rounds = p.at("rounds");
    m->params.max_depth = p.at("max_depth");
    m->params.learning_rate = p.at("learning_rate");
    m->params.l2 = p.at("l2");
    m->params.min_child_weight = p.at("min_child_weight");
    for (const auto& jt : j.at("trees")) {
      std::vector<detail::GbdtNode> tree;
      for (const auto& jn : jt)
        tree.push_back({jn.at(0), jn.at(1), jn.at(2), jn.at(3), jn.at(4)});
      m->trees.push_back(std::move(tree));
    }
    return m;
  }
  if (kind == "logreg" || kind == "linear_svm") {
    auto m = std::make_unique<detail::LinearModel>();
    m->kind_ = model_kind_from_name(kind);
    m->beta = j.at("beta").get<std::vector<double>>();
    m->intercept = j.at("intercept").get<double>();
    return m;
  }
  if (kind == "knn") {
    auto m = std::make_unique<detail::KnnModel>();
    m->params.k = j.at("k");
    m->x = j.at("x").get<std::vector<std::vector<double>>>();
    m->y = j.at("y").get<std::vector<int>>();
    m->w = j.at("w").get<std::vector<double>>();
    return m;
  }
  if (kind == "mlp") {
    auto m = std::make_unique<detail::MlpModel>();
    m->dim_ = j.at("dim").get<std::size_t>();
    m->params.hidden = j.at("hidden");
    m->w1 = j.at("w1").get<std::vector<double>>();
    m->b1 = j.at("b1").get<std::vector<double>>();
    m->w2 = j.at("w2").get<std::vector<double>>();
    m->b2 = j.at("b2").get<double>();
    return m;
  }
  throw Error(Errc::parse_error, "unknown model kind '" + kind + "'");
}

}  // namespace longadapt
