#include "longadapt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace longadapt {

namespace {

void check_both_classes(const std::vector<int>& labels) {
  bool has0 = false, has1 = false;
  for (int y : labels) (y ? has1 : has0) = true;
  if (!has0 || !has1) throw Error(Errc::single_class, "need both classes");
}

std::vector<double> midranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * (i + j) + 1.0;  // average of 1-based ranks i+1..j+1
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

double std_normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw Error(Errc::dimension_mismatch, "auroc");
  check_both_classes(labels);
  const auto rank = midranks(scores);
  double rank_sum_pos = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i]) {
      rank_sum_pos += rank[i];
      ++n_pos;
    }
  const std::size_t n_neg = labels.size() - n_pos;
  const double u = rank_sum_pos - 0.5 * n_pos * (n_pos + 1.0);
  return u / (static_cast<double>(n_pos) * n_neg);
}

std::vector<RocPoint> roc_points(const std::vector<double>& scores,
                                 const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw Error(Errc::dimension_mismatch, "roc_points");
  check_both_classes(labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  double n_pos = 0, n_neg = 0;
  for (int y : labels) (y ? n_pos : n_neg) += 1.0;

  std::vector<RocPoint> pts{{0.0, 0.0}};
  double tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k)
      (labels[order[k]] ? tp : fp) += 1.0;
    pts.push_back({fp / n_neg, tp / n_pos});
    i = j + 1;
  }
  return pts;  // last point is (1,1) by construction
}

double roc_area(const std::vector<RocPoint>& pts) {
  double area = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    area += 0.5 * (pts[i].tpr + pts[i - 1].tpr) * (pts[i].fpr - pts[i - 1].fpr);
  return area;
}

double f1(const std::vector<int>& pred, const std::vector<int>& truth,
          int positive_class) {
  if (pred.size() != truth.size()) throw Error(Errc::dimension_mismatch, "f1");
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] == positive_class;
    const bool t = truth[i] == positive_class;
    if (p && t) ++tp;
    else if (p) ++fp;
    else if (t) ++fn;
  }
  const double denom = 2.0 * tp + fp + fn;
  return denom == 0.0 ? 0.0 : 2.0 * tp / denom;
}

WilcoxonOutcome wilcoxon_one_sided(const PairedSample& sample, ZeroPolicy zeros) {
  if (sample.values_a.size() != sample.values_b.size() ||
      sample.values_a.empty())
    throw Error(Errc::dimension_mismatch, "paired sample lengths");
  WilcoxonOutcome out;
  out.n_pairs = sample.values_a.size();

  std::vector<double> diffs;
  for (std::size_t i = 0; i < out.n_pairs; ++i) {
    const double d = sample.values_a[i] - sample.values_b[i];
    if (d != 0.0 || zeros == ZeroPolicy::pratt) diffs.push_back(d);
  }
  std::vector<double> abs_d;
  for (double d : diffs) abs_d.push_back(std::fabs(d));
  if (std::all_of(diffs.begin(), diffs.end(),
                  [](double d) { return d == 0.0; }))
    throw Error(Errc::all_zero_differences, "no nonzero differences");

  auto rank = midranks(abs_d);
  // Pratt: rank including zeros, then drop the zero pairs
  std::vector<double> signed_ranks;
  for (std::size_t i = 0; i < diffs.size(); ++i)
    if (diffs[i] != 0.0) signed_ranks.push_back(diffs[i] > 0 ? rank[i] : -rank[i]);
  out.n_effective = signed_ranks.size();
  for (double r : signed_ranks)
    if (r > 0) out.w_plus += r;

  // tie-corrected variance; zeros (Pratt) enter the tie counts as ranked
  std::map<double, std::size_t> tie_groups;
  for (std::size_t i = 0; i < abs_d.size(); ++i) ++tie_groups[abs_d[i]];
  bool has_ties = false;
  double tie_term = 0.0;
  for (const auto& [v, t] : tie_groups) {
    if (t > 1) has_ties = true;
    tie_term += static_cast<double>(t) * t * t - t;
  }

  const double n = static_cast<double>(out.n_effective);
  double mean = n * (n + 1.0) / 4.0;
  double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  if (zeros == ZeroPolicy::pratt && diffs.size() != signed_ranks.size()) {
    // Pratt correction: zeros occupy the lowest ranks
    const double n0 = static_cast<double>(diffs.size() - signed_ranks.size());
    const double m = static_cast<double>(diffs.size());
    mean = (m * (m + 1.0) - n0 * (n0 + 1.0)) / 4.0;
    var = (m * (m + 1.0) * (2.0 * m + 1.0) - n0 * (n0 + 1.0) * (2.0 * n0 + 1.0)) /
              24.0 -
          tie_term / 48.0;
  }
  out.z = var > 0.0 ? (out.w_plus - mean) / std::sqrt(var) : 0.0;

  const bool exact_ok = zeros == ZeroPolicy::discard && !has_ties &&
                        out.n_effective <= 12 && out.n_effective >= 1;
  if (exact_ok) {
    out.mode = "exact";
    // enumerate all 2^n sign assignments of the ranks
    const std::size_t m = out.n_effective;
    std::vector<double> ranks_only;
    for (double r : signed_ranks) ranks_only.push_back(std::fabs(r));
    std::size_t ge = 0;
    const std::size_t total = std::size_t{1} << m;
    for (std::size_t bits = 0; bits < total; ++bits) {
      double w = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        if (bits & (std::size_t{1} << i)) w += ranks_only[i];
      if (w >= out.w_plus) ++ge;
    }
    out.p_one_sided = static_cast<double>(ge) / static_cast<double>(total);
  } else {
    out.mode = "normal-approx";
    out.p_one_sided = std_normal_sf(out.z);
  }
  out.effect_size_r = out.z / std::sqrt(2.0 * static_cast<double>(out.n_pairs));
  return out;
}

double fleiss_kappa(const std::vector<std::vector<int>>& ratings) {
  if (ratings.empty() || ratings[0].empty())
    throw Error(Errc::row_sum_mismatch, "empty rating matrix");
  const std::size_t n_items = ratings.size();
  const std::size_t n_cat = ratings[0].size();
  long long raters = 0;
  for (int c : ratings[0]) raters += c;
  if (raters < 2) throw Error(Errc::row_sum_mismatch, "need >= 2 raters");

  // integer accumulation so the worked examples come out exact
  long long agree_num = 0;  // sum over items of (sum n_ij^2 - n)
  std::vector<long long> col(n_cat, 0);
  for (const auto& row : ratings) {
    if (row.size() != n_cat)
      throw Error(Errc::row_sum_mismatch, "ragged rating matrix");
    long long rs = 0, sq = 0;
    for (std::size_t j = 0; j < n_cat; ++j) {
      if (row[j] < 0) throw Error(Errc::row_sum_mismatch, "negative count");
      rs += row[j];
      sq += static_cast<long long>(row[j]) * row[j];
      col[j] += row[j];
    }
    if (rs != raters)
      throw Error(Errc::row_sum_mismatch, "row sum != rater count");
    agree_num += sq - raters;
  }
  const double p_bar = static_cast<double>(agree_num) /
                       (static_cast<double>(n_items) * raters * (raters - 1));
  long long pe_num = 0;
  for (long long c : col) pe_num += c * c;
  const double total = static_cast<double>(n_items) * raters;
  const double p_e = static_cast<double>(pe_num) / (total * total);
  if (p_e == 1.0) {
    if (p_bar == 1.0) return 1.0;
    throw Error(Errc::degenerate_agreement, "chance agreement is 1");
  }
  return (p_bar - p_e) / (1.0 - p_e);
}

const char* task_name(Task t) { return t == Task::arousal ? "arousal" : "valence"; }

Task task_from_name(const std::string& s) {
  if (s == "arousal") return Task::arousal;
  if (s == "valence") return Task::valence;
  throw Error(Errc::parse_error, "unknown task '" + s + "'");
}

std::vector<ParticipantClassStats> class_distribution(
    const std::vector<WindowInstance>& windows, Task task) {
  std::map<std::string, std::map<int, std::pair<std::size_t, std::size_t>>> acc;
  for (const auto& w : windows) {
    auto& [neg, tot] = acc[w.participant_id][w.session_index];
    const int label = task == Task::arousal ? w.arousal : w.valence;
    if (label == 0) ++neg;
    ++tot;
  }
  std::vector<ParticipantClassStats> out;
  for (const auto& [pid, sessions] : acc) {
    ParticipantClassStats ps;
    ps.participant_id = pid;
    double sum = 0.0;
    for (const auto& [sidx, counts] : sessions) {
      const double frac =
          static_cast<double>(counts.first) / static_cast<double>(counts.second);
      ps.sessions.push_back({pid, sidx, frac, counts.second});
      sum += frac;
    }
    const double n = static_cast<double>(ps.sessions.size());
    ps.mean_negative_fraction = sum / n;
    double var = 0.0;
    for (const auto& s : ps.sessions) {
      const double d = s.negative_fraction - ps.mean_negative_fraction;
      var += d * d;
    }
    ps.sd_across_sessions = std::sqrt(var / n);
    out.push_back(std::move(ps));
  }
  return out;
}

}  // namespace longadapt
