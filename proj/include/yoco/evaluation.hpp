#pragma once

#include "yoco/common.hpp"
#include "yoco/dataset.hpp"
#include "yoco/nn.hpp"
#include "yoco/scoring.hpp"
#include "yoco/selection.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace yoco {

struct AccuracyStats {
  double mean = 0.0;
  double stddev = 0.0;  // population std over the seed set
  std::vector<std::pair<std::uint64_t, double>> per_seed;
  long n_train_used = 0;
  std::vector<std::string> warnings;
};

struct SweepRow {
  double ratio = 0.0;
  AccuracyStats easy_acc;
  AccuracyStats hard_acc;
  double diff_mean = 0.0;  // easy minus hard
};

struct TurningPointReport {
  std::optional<double> crossover_ratio;  // first <=0 to >0 transition, interpolated
  int sign_changes = 0;                   // sign(0) counts as positive
};

// One requested pipeline variant for compare_methods.
struct MethodSpec {
  std::string metric;    // lbpe | el2n | forgetting | aum | entropy | ssp | random
  std::string selector;  // rank | balanced | ccs | random
  std::map<std::string, std::string> params;
};

struct MethodResult {
  MethodSpec method;
  SubsetIndex subset;
  AccuracyStats stats;
};

struct ComparisonReport {
  std::vector<MethodResult> rows;
  // metric -> balanced-minus-rank accuracy gain, for metrics with both rows
  std::vector<std::pair<std::string, double>> balanced_gains;
};

// Fraction of samples whose predicted class (argmax, ties to the lower id)
// matches the label.
double accuracy_on(const ModelParams& params, const Dataset& data);

// Retrains from scratch once per seed on the selected rows and measures test
// accuracy. A class absent from the subset is recorded as a warning.
AccuracyStats evaluate_subset(const Dataset& train, const SubsetIndex& subset,
                              const Dataset& test, const TrainConfig& cfg,
                              const std::vector<std::uint64_t>& seeds);

// For every ratio, evaluates the easy-end and hard-end subsets of equal size
// with identical seeds (paired comparison; only the subset differs).
std::vector<SweepRow> ratio_sweep(const Dataset& train, const Dataset& test,
                                  const ScoreVector& scores, const std::vector<double>& ratios,
                                  const TrainConfig& cfg,
                                  const std::vector<std::uint64_t>& seeds);

TurningPointReport find_turning_point(const std::vector<SweepRow>& rows);

ComparisonReport compare_methods(const Dataset& train, const Dataset& test,
                                 const DynamicsLog& log, const std::vector<MethodSpec>& methods,
                                 const SelectionTarget& target, const TrainConfig& cfg,
                                 const std::vector<std::uint64_t>& seeds);

// Report files. Every header carries the config hash; generated file names
// embed its first 8 hex digits via report_basename.
std::string report_basename(const std::string& stem, const std::string& config_hash);
void write_eval_report_csv(const AccuracyStats& stats, const SubsetIndex& subset,
                           const std::string& path, const std::string& config_hash);
std::string render_eval_markdown(const AccuracyStats& stats, const SubsetIndex& subset,
                                 const std::string& config_hash);
void write_sweep_csv(const std::vector<SweepRow>& rows, const TurningPointReport& turning,
                     const std::string& path, const std::string& config_hash);
std::string render_sweep_markdown(const std::vector<SweepRow>& rows,
                                  const TurningPointReport& turning,
                                  const std::string& config_hash);
std::string render_comparison_markdown(const ComparisonReport& report,
                                       const std::string& config_hash);

}  // namespace yoco
