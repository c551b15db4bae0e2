#include "yoco/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace yoco {

namespace {

std::string fmt(double v, const char* spec = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

Dataset take_rows(const Dataset& data, const std::vector<long>& rows) {
  Dataset out;
  out.num_classes = data.num_classes;
  out.image_shape = data.image_shape;
  out.label_mapping = data.label_mapping;
  out.features.resize(static_cast<long>(rows.size()), data.dim());
  out.labels.resize(static_cast<long>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.features.row(static_cast<long>(r)) = data.features.row(rows[r]);
    out.labels[static_cast<long>(r)] = data.labels[rows[r]];
  }
  return out;
}

int parse_int_param(const MethodSpec& m, const std::string& key, int fallback) {
  auto it = m.params.find(key);
  if (it == m.params.end()) return fallback;
  try {
    return std::stoi(it->second);
  } catch (const std::exception&) {
    throw ConfigError("method parameter " + key + "='" + it->second + "' is not an integer");
  }
}

double parse_double_param(const MethodSpec& m, const std::string& key, double fallback) {
  auto it = m.params.find(key);
  if (it == m.params.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ConfigError("method parameter " + key + "='" + it->second + "' is not a number");
  }
}

}  // namespace

double accuracy_on(const ModelParams& params, const Dataset& data) {
  const MatrixRXf logits = forward(params, data.features);
  long correct = 0;
  for (long i = 0; i < data.size(); ++i) {
    long best = 0;
    for (long c = 1; c < logits.cols(); ++c)
      if (logits(i, c) > logits(i, best)) best = c;
    if (best == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

AccuracyStats evaluate_subset(const Dataset& train, const SubsetIndex& subset,
                              const Dataset& test, const TrainConfig& cfg,
                              const std::vector<std::uint64_t>& seeds) {
  if (subset.indices.empty()) throw ConfigError("subset is empty");
  if (seeds.empty()) throw ConfigError("need at least one evaluation seed");
  validate_subset(subset, train.size());
  validate_dataset(train);
  validate_dataset(test);
  if (test.num_classes != train.num_classes || test.dim() != train.dim())
    throw ConfigError("train and test sets disagree on shape or classes");

  Dataset sub = take_rows(train, subset.indices);

  AccuracyStats stats;
  stats.n_train_used = sub.size();
  Eigen::VectorXi counts = class_histogram(sub);
  for (int k = 0; k < counts.size(); ++k)
    if (counts[k] == 0)
      stats.warnings.push_back("class " + std::to_string(k) + " has no samples in the subset");

  TrainConfig run = cfg;
  run.record_dynamics = false;
  double sum = 0.0, sumsq = 0.0;
  for (std::uint64_t seed : seeds) {
    run.seed = seed;
    TrainResult result = train_with_dynamics(sub, run);
    const double acc = accuracy_on(result.params, test);
    stats.per_seed.emplace_back(seed, acc);
    sum += acc;
    sumsq += acc * acc;
  }
  const double n = static_cast<double>(seeds.size());
  stats.mean = sum / n;
  stats.stddev = std::sqrt(std::max(0.0, sumsq / n - stats.mean * stats.mean));
  return stats;
}

std::vector<SweepRow> ratio_sweep(const Dataset& train, const Dataset& test,
                                  const ScoreVector& scores, const std::vector<double>& ratios,
                                  const TrainConfig& cfg,
                                  const std::vector<std::uint64_t>& seeds) {
  if (ratios.empty()) throw ConfigError("no ratios to sweep");
  double prev = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0 && r < 1.0)) throw ConfigError("ratio " + fmt(r, "%g") + " is outside (0, 1)");
    if (r <= prev && prev != 0.0) throw ConfigError("ratios must be strictly ascending");
    prev = r;
  }
  if (scores.size() != train.size())
    throw ConfigError("scores cover " + std::to_string(scores.size()) + " samples but the " +
                      "training set has " + std::to_string(train.size()));

  std::vector<SweepRow> rows;
  rows.reserve(ratios.size());
  for (double ratio : ratios) {
    auto [easy, hard] = as_easy_hard_split(scores, train.labels, train.num_classes, ratio);
    SweepRow row;
    row.ratio = ratio;
    row.easy_acc = evaluate_subset(train, easy, test, cfg, seeds);
    row.hard_acc = evaluate_subset(train, hard, test, cfg, seeds);
    row.diff_mean = row.easy_acc.mean - row.hard_acc.mean;
    rows.push_back(std::move(row));
  }
  return rows;
}

TurningPointReport find_turning_point(const std::vector<SweepRow>& rows) {
  if (rows.size() < 2) throw ConfigError("turning-point scan needs at least 2 sweep rows");
  TurningPointReport report;
  auto positive = [](double v) { return v >= 0.0; };  // sign(0) treated as positive
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (positive(rows[i].diff_mean) != positive(rows[i - 1].diff_mean)) ++report.sign_changes;
    if (!report.crossover_ratio && rows[i - 1].diff_mean <= 0.0 && rows[i].diff_mean > 0.0) {
      const double d0 = rows[i - 1].diff_mean, d1 = rows[i].diff_mean;
      const double r0 = rows[i - 1].ratio, r1 = rows[i].ratio;
      report.crossover_ratio = r0 + (0.0 - d0) * (r1 - r0) / (d1 - d0);
    }
  }
  return report;
}

ComparisonReport compare_methods(const Dataset& train, const Dataset& test,
                                 const DynamicsLog& log, const std::vector<MethodSpec>& methods,
                                 const SelectionTarget& target, const TrainConfig& cfg,
                                 const std::vector<std::uint64_t>& seeds) {
  if (methods.empty()) throw ConfigError("no methods to compare");
  validate_target(target);
  if (static_cast<long>(log.num_samples) != train.size())
    throw ConfigError("log covers " + std::to_string(log.num_samples) +
                      " samples but the training set has " + std::to_string(train.size()));

  const int c = train.num_classes;
  const long total = target.total_count ? *target.total_count : *target.per_class * c;
  long per_class = 0;
  if (target.per_class) {
    per_class = *target.per_class;
  } else if (total % c == 0) {
    per_class = total / c;
  }

  // Feature net for ssp, trained lazily on the full set.
  std::optional<MatrixRXf> ssp_features;
  auto features = [&]() -> const MatrixRXf& {
    if (!ssp_features) {
      TrainConfig run = cfg;
      run.record_dynamics = false;
      ssp_features = extract_features(train_with_dynamics(train, run).params, train);
    }
    return *ssp_features;
  };

  std::map<std::string, ScoreVector> cache;
  auto scores_for = [&](const MethodSpec& m) -> const ScoreVector& {
    auto it = cache.find(m.metric);
    if (it != cache.end()) return it->second;
    const int e = static_cast<int>(log.num_epochs());
    ScoreVector sv;
    if (m.metric == "lbpe") {
      sv = lbpe_score(log, parse_int_param(m, "early_epochs", std::min(30, e)),
                      parse_int_param(m, "topk", 5));
    } else if (m.metric == "el2n") {
      sv = el2n_score(log, parse_int_param(m, "first_n", std::min(10, e)));
    } else if (m.metric == "forgetting") {
      sv = forgetting_score(log);
    } else if (m.metric == "aum") {
      sv = aum_score(log);
    } else if (m.metric == "entropy") {
      sv = entropy_score(log);
    } else if (m.metric == "ssp") {
      sv = ssp_distance_score(features(), train.labels,
                              parse_int_param(m, "clusters_per_class", 1), cfg.seed);
    } else {
      throw ConfigError("unknown metric '" + m.metric + "'");
    }
    return cache.emplace(m.metric, std::move(sv)).first->second;
  };

  ComparisonReport report;
  for (const MethodSpec& m : methods) {
    const Prefer prefer =
        m.params.count("prefer") && m.params.at("prefer") == "hard" ? Prefer::hard : Prefer::easy;
    SubsetIndex subset;
    if (m.selector == "random" || m.metric == "random") {
      subset = random_select(train.size(), total,
                             static_cast<std::uint64_t>(parse_int_param(m, "seed", 0)));
      attach_class_counts(subset, train.labels, c);
    } else if (m.selector == "rank") {
      subset = rank_select(scores_for(m), train.labels, c, total, prefer);
    } else if (m.selector == "balanced") {
      if (per_class == 0)
        throw ConfigError("balanced selection needs a per-class budget (total " +
                          std::to_string(total) + " does not divide into " + std::to_string(c) +
                          " classes)");
      subset = balanced_select(scores_for(m), train.labels, c, per_class, false, prefer);
    } else if (m.selector == "ccs") {
      subset = ccs_select(scores_for(m), train.labels, c, total,
                          parse_double_param(m, "hard_cutoff", 0.3),
                          parse_int_param(m, "num_strata", 50),
                          static_cast<std::uint64_t>(parse_int_param(m, "seed", 0)));
    } else {
      throw ConfigError("unknown selector '" + m.selector + "'");
    }

    MethodResult row;
    row.method = m;
    row.stats = evaluate_subset(train, subset, test, cfg, seeds);
    row.subset = std::move(subset);
    report.rows.push_back(std::move(row));
  }

  // Tab-5 style pairing: balanced minus rank for metrics carrying both.
  for (const MethodResult& a : report.rows) {
    if (a.method.selector != "balanced") continue;
    for (const MethodResult& b : report.rows) {
      if (b.method.selector == "rank" && b.method.metric == a.method.metric) {
        report.balanced_gains.emplace_back(a.method.metric, a.stats.mean - b.stats.mean);
        break;
      }
    }
  }
  return report;
}

std::string report_basename(const std::string& stem, const std::string& config_hash) {
  const std::string tag = config_hash.substr(0, 8);
  return tag.empty() ? stem : stem + "." + tag;
}

void write_eval_report_csv(const AccuracyStats& stats, const SubsetIndex& subset,
                           const std::string& path, const std::string& config_hash) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "# config_hash=" << config_hash << "\n";
  out << "# method=" << subset.method << " n_train_used=" << stats.n_train_used << "\n";
  for (const std::string& w : stats.warnings) out << "# warning: " << w << "\n";
  out << "row,seed,test_accuracy\n";
  for (const auto& [seed, acc] : stats.per_seed)
    out << "seed," << seed << "," << fmt(acc) << "\n";
  out << "mean,," << fmt(stats.mean) << "\n";
  out << "std,," << fmt(stats.stddev) << "\n";
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string render_eval_markdown(const AccuracyStats& stats, const SubsetIndex& subset,
                                 const std::string& config_hash) {
  std::ostringstream md;
  md << "# Subset evaluation\n\n";
  md << "config_hash: `" << config_hash << "`\n\n";
  md << "- method: " << (subset.method.empty() ? "(unlabeled)" : subset.method) << "\n";
  md << "- training rows used: " << stats.n_train_used << "\n";
  for (const std::string& w : stats.warnings) md << "- warning: " << w << "\n";
  md << "\n| seed | test accuracy |\n|---:|---:|\n";
  for (const auto& [seed, acc] : stats.per_seed)
    md << "| " << seed << " | " << fmt(acc, "%.4f") << " |\n";
  md << "\nmean " << fmt(stats.mean, "%.4f") << ", std " << fmt(stats.stddev, "%.4f") << " over "
     << stats.per_seed.size() << " seeds\n";
  return md.str();
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const TurningPointReport& turning,
                     const std::string& path, const std::string& config_hash) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "# config_hash=" << config_hash << "\n";
  if (turning.crossover_ratio)
    out << "# crossover_ratio=" << fmt(*turning.crossover_ratio) << "\n";
  else
    out << "# crossover_ratio=none\n";
  out << "# sign_changes=" << turning.sign_changes << "\n";
  out << "ratio,easy_mean,easy_std,hard_mean,hard_std,diff_mean\n";
  for (const SweepRow& row : rows) {
    // ratio is an input knob; print it the way the user wrote it
    out << fmt(row.ratio, "%g") << "," << fmt(row.easy_acc.mean) << ","
        << fmt(row.easy_acc.stddev) << "," << fmt(row.hard_acc.mean) << ","
        << fmt(row.hard_acc.stddev) << "," << fmt(row.diff_mean) << "\n";
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string render_sweep_markdown(const std::vector<SweepRow>& rows,
                                  const TurningPointReport& turning,
                                  const std::string& config_hash) {
  std::ostringstream md;
  md << "# Pruning-ratio sweep\n\n";
  md << "config_hash: `" << config_hash << "`\n\n";
  md << "| ratio | easy mean | hard mean | easy - hard |\n|---:|---:|---:|---:|\n";
  for (const SweepRow& row : rows)
    md << "| " << fmt(row.ratio, "%.2f") << " | " << fmt(row.easy_acc.mean, "%.4f") << " | "
       << fmt(row.hard_acc.mean, "%.4f") << " | " << fmt(row.diff_mean, "%+.4f") << " |\n";
  md << "\n";
  if (turning.crossover_ratio)
    md << "Turning point: easy-first overtakes hard-first near ratio "
       << fmt(*turning.crossover_ratio, "%.3f") << " (" << turning.sign_changes
       << " sign change" << (turning.sign_changes == 1 ? "" : "s") << ").\n";
  else
    md << "Turning point: none detected (" << turning.sign_changes << " sign changes).\n";
  return md.str();
}

std::string render_comparison_markdown(const ComparisonReport& report,
                                       const std::string& config_hash) {
  std::ostringstream md;
  md << "# Method comparison\n\n";
  md << "config_hash: `" << config_hash << "`\n\n";
  md << "| metric | selector | subset size | mean acc | std |\n|---|---|---:|---:|---:|\n";
  for (const MethodResult& row : report.rows)
    md << "| " << row.method.metric << " | " << row.method.selector << " | "
       << row.subset.size() << " | " << fmt(row.stats.mean, "%.4f") << " | "
       << fmt(row.stats.stddev, "%.4f") << " |\n";
  if (!report.balanced_gains.empty()) {
    md << "\nBalanced-construction gains (balanced minus rank):\n\n";
    for (const auto& [metric, gain] : report.balanced_gains)
      md << "- " << metric << ": " << fmt(gain, "%+.4f") << "\n";
  }
  return md.str();
}

}  // namespace yoco
