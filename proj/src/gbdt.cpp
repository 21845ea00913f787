#include <algorithm>
#include <numeric>

#include "classifiers_impl.hpp"

namespace longadapt::detail {

double GbdtModel::margin(const std::vector<double>& f) const {
  double m = 0.0;
  for (const auto& tree : trees) {
    int node = 0;
    while (tree[node].feature >= 0)
      node = f[tree[node].feature] < tree[node].threshold ? tree[node].left
                                                          : tree[node].right;
    m += tree[node].value;
  }
  return m;
}

double GbdtModel::predict_score(const std::vector<double>& f) const {
  if (f.size() != dim_) throw Error(Errc::dimension_mismatch, "gbdt predict");
  return sigmoid(margin(f));
}

namespace {

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// members: instance indices of the node. g/h are per-instance weighted
// first/second derivatives of the logistic loss.
SplitChoice best_split(const std::vector<int>& members,
                       const std::vector<std::vector<double>>& x,
                       const std::vector<double>& g,
                       const std::vector<double>& h, const GbdtParams& p) {
  SplitChoice best;
  double gtot = 0.0, htot = 0.0;
  for (int i : members) {
    gtot += g[i];
    htot += h[i];
  }
  const double parent = gtot * gtot / (htot + p.l2);
  const std::size_t dim = x[members[0]].size();

  std::vector<std::pair<double, int>> order;
  order.reserve(members.size());
  for (std::size_t f = 0; f < dim; ++f) {
    order.clear();
    for (int i : members) order.emplace_back(x[i][f], i);
    std::sort(order.begin(), order.end());
    double gl = 0.0, hl = 0.0;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      gl += g[order[k].second];
      hl += h[order[k].second];
      if (order[k].first == order[k + 1].first) continue;
      const double gr = gtot - gl, hr = htot - hl;
      if (hl < p.min_child_weight || hr < p.min_child_weight) continue;
      const double gain =
          gl * gl / (hl + p.l2) + gr * gr / (hr + p.l2) - parent;
      if (gain > best.gain + 1e-12) {
        best.found = true;
        best.feature = static_cast<int>(f);
        best.threshold = 0.5 * (order[k].first + order[k + 1].first);
        best.gain = gain;
      }
    }
  }
  return best;
}

}  // namespace

std::unique_ptr<GbdtModel> train_gbdt(const GbdtParams& p,
                                      const PreparedData& d) {
  auto model = std::make_unique<GbdtModel>();
  model->params = p;
  model->dim_ = d.dim;
  const std::size_t n = d.x.size();

  std::vector<double> margin(n, 0.0), g(n), h(n);
  for (int round = 0; round < p.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double pr = sigmoid(margin[i]);
      g[i] = d.w[i] * (pr - d.y[i]);
      h[i] = d.w[i] * pr * (1.0 - pr);
    }

    std::vector<GbdtNode> tree;
    struct Work {
      int node;
      int depth;
      std::vector<int> members;
    };
    std::vector<Work> queue;
    tree.emplace_back();
    {
      std::vector<int> all(n);
      std::iota(all.begin(), all.end(), 0);
      queue.push_back({0, 0, std::move(all)});
    }
    // breadth-first expansion keeps node numbering deterministic
    for (std::size_t q = 0; q < queue.size(); ++q) {
      auto work = std::move(queue[q]);
      SplitChoice split;
      if (work.depth < p.max_depth && work.members.size() >= 2)
        split = best_split(work.members, d.x, g, h, p);
      if (!split.found) {
        double gs = 0.0, hs = 0.0;
        for (int i : work.members) {
          gs += g[i];
          hs += h[i];
        }
        const double value = -p.learning_rate * gs / (hs + p.l2);
        tree[work.node].value = value;
        for (int i : work.members) margin[i] += value;
        continue;
      }
      std::vector<int> left, right;
      for (int i : work.members)
        (d.x[i][split.feature] < split.threshold ? left : right).push_back(i);
      tree[work.node].feature = split.feature;
      tree[work.node].threshold = split.threshold;
      tree[work.node].left = static_cast<int>(tree.size());
      tree.emplace_back();
      tree[work.node].right = static_cast<int>(tree.size());
      tree.emplace_back();
      queue.push_back({tree[work.node].left, work.depth + 1, std::move(left)});
      queue.push_back({tree[work.node].right, work.depth + 1, std::move(right)});
    }
    model->trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace longadapt::detail

namespace longadapt {

double gbdt_root_gain(const WeightedDataset& data, std::size_t feature,
                      double threshold, double l2) {
  if (data.size() == 0) throw Error(Errc::empty_data, "gbdt_root_gain");
  if (feature >= data.dim())
    throw Error(Errc::invalid_split, "feature index out of range");
  double gl = 0, hl = 0, gr = 0, hr = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    // p = 0.5 at the initial margin: g = w*(p - y), h = w*p*(1-p)
    const double g = data.w[i] * (0.5 - data.y[i]);
    const double h = data.w[i] * 0.25;
    if (data.x[i][feature] < threshold) {
      gl += g;
      hl += h;
    } else {
      gr += g;
      hr += h;
    }
  }
  const double g = gl + gr, h = hl + hr;
  return gl * gl / (hl + l2) + gr * gr / (hr + l2) - g * g / (h + l2);
}

}  // namespace longadapt
