#pragma once

#include <string>
#include <vector>

#include "longadapt/common.hpp"
#include "longadapt/preprocess.hpp"

namespace longadapt {

// P(score_pos > score_neg) + 0.5*P(tie) via midranks.
double auroc(const std::vector<double>& scores, const std::vector<int>& labels);

struct RocPoint {
  double fpr;
  double tpr;
};

// One point per distinct threshold (descending), from (0,0) to (1,1).
// Trapezoidal area over these points equals auroc.
std::vector<RocPoint> roc_points(const std::vector<double>& scores,
                                 const std::vector<int>& labels);

double roc_area(const std::vector<RocPoint>& points);

double f1(const std::vector<int>& pred, const std::vector<int>& truth,
          int positive_class);

struct PairedSample {
  std::string name_a;
  std::string name_b;
  std::vector<double> values_a;
  std::vector<double> values_b;
};

struct WilcoxonOutcome {
  std::size_t n_pairs = 0;      // before zero-difference handling
  std::size_t n_effective = 0;  // after
  double w_plus = 0.0;
  double z = 0.0;
  double p_one_sided = 1.0;
  double effect_size_r = 0.0;   // Z / sqrt(2 * n_pairs)
  std::string mode;             // "exact" or "normal-approx"
};

enum class ZeroPolicy { discard, pratt };

// One-sided test of a > b. Exact sign enumeration when n_effective <= 12
// and the |differences| are tie-free; tie-corrected normal approximation
// otherwise.
WilcoxonOutcome wilcoxon_one_sided(const PairedSample& sample,
                                   ZeroPolicy zeros = ZeroPolicy::discard);

// ratings: items x categories counts; every row must sum to n_raters.
double fleiss_kappa(const std::vector<std::vector<int>>& ratings);

enum class Task { arousal, valence };
const char* task_name(Task t);
Task task_from_name(const std::string& s);

struct SessionClassStats {
  std::string participant_id;
  int session_index;
  double negative_fraction;
  std::size_t n_windows;
};

struct ParticipantClassStats {
  std::string participant_id;
  double mean_negative_fraction;
  double sd_across_sessions;  // population sd
  std::vector<SessionClassStats> sessions;
};

std::vector<ParticipantClassStats> class_distribution(
    const std::vector<WindowInstance>& windows, Task task);

}  // namespace longadapt
