#pragma once

#include "yoco/common.hpp"
#include "yoco/dynamics_log.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace yoco {

enum class ScoreDirection {
  lower_is_easier,
  higher_is_easier,
};

// Per-sample difficulty scores plus enough provenance to interpret them.
struct ScoreVector {
  VectorX<double> scores;
  std::string metric;  // lbpe | el2n | forgetting | aum | entropy | ssp_distance
  ScoreDirection direction = ScoreDirection::lower_is_easier;
  std::vector<int> epochs_used;
  std::uint64_t source_log_hash = 0;
  std::vector<std::string> warnings;

  long size() const { return scores.size(); }
};

// Per-sample prediction error at one epoch: |softmax(logits) - onehot(y)|_2.
// raw_logits switches softmax off (ablation mode: the norm is taken on the
// logits themselves).
VectorX<double> lbpe_per_epoch(const DynamicsLog& log, int epoch, bool raw_logits = false);

// Indices of the K highest accuracies; ties prefer the earlier epoch; result
// sorted ascending. K > E is an error here (lbpe_score owns the clamping).
std::vector<int> topk_epochs(const std::vector<double>& accuracies, int k);

// Mean prediction error over the top-K-accuracy epochs among the first
// early_epochs. K is clamped to early_epochs with a recorded warning.
ScoreVector lbpe_score(const DynamicsLog& log, int early_epochs, int k, bool raw_logits = false);

// Mean prediction error over the first first_n epochs.
ScoreVector el2n_score(const DynamicsLog& log, int first_n = 10);

// Number of correct->incorrect transitions across consecutive epochs;
// never-correct samples score E (maximally forgotten).
ScoreVector forgetting_score(const DynamicsLog& log);

// Mean over epochs of the raw-logit margin logits[y] - max_{c != y} logits[c].
ScoreVector aum_score(const DynamicsLog& log);

// Softmax entropy at the final recorded epoch, with 0*ln0 := 0.
ScoreVector entropy_score(const DynamicsLog& log);

// Per-class k-means (k-means++ seeding, <= 100 iterations, tolerance 1e-6);
// score = Euclidean distance to the assigned centroid.
ScoreVector ssp_distance_score(const MatrixRXf& features, const Eigen::VectorXi& labels,
                               int clusters_per_class, std::uint64_t seed);

// CSV: sample_index,score,metric,direction ordered by sample index.
void write_scores_csv(const ScoreVector& scores, const std::string& path,
                      const std::string& header_comment = "");
ScoreVector read_scores_csv(const std::string& path);

}  // namespace yoco
