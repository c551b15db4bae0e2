#include "yoco/selection.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace yoco {

namespace {

void check_scores_labels(const ScoreVector& scores, const Eigen::VectorXi& labels,
                         int num_classes) {
  if (scores.size() != labels.size())
    throw ConfigError("scores cover " + std::to_string(scores.size()) + " samples but " +
                      std::to_string(labels.size()) + " labels given");
  if (num_classes < 2) throw ConfigError("need at least 2 classes");
  for (long i = 0; i < labels.size(); ++i)
    if (labels[i] < 0 || labels[i] >= num_classes)
      throw ConfigError("label " + std::to_string(labels[i]) + " at row " + std::to_string(i) +
                        " is outside [0, " + std::to_string(num_classes) + ")");
  for (long i = 0; i < scores.size(); ++i)
    if (!std::isfinite(scores.scores[i]))
      throw ConfigError("non-finite score at row " + std::to_string(i));
}

// Sample indices ordered most-preferred first; ties go to the lower index.
std::vector<long> preferred_order(const ScoreVector& scores, Prefer prefer) {
  const bool ascending =
      (scores.direction == ScoreDirection::lower_is_easier) == (prefer == Prefer::easy);
  std::vector<long> order(scores.size());
  std::iota(order.begin(), order.end(), 0L);
  std::stable_sort(order.begin(), order.end(), [&](long a, long b) {
    const double sa = scores.scores[a], sb = scores.scores[b];
    if (sa != sb) return ascending ? sa < sb : sa > sb;
    return a < b;
  });
  return order;
}

std::string prefer_name(Prefer p) { return p == Prefer::easy ? "easy" : "hard"; }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void finish(SubsetIndex& subset, const ScoreVector& scores, const Eigen::VectorXi& labels,
            int num_classes) {
  std::sort(subset.indices.begin(), subset.indices.end());
  attach_class_counts(subset, labels, num_classes);
  if (scores.source_log_hash != 0)
    subset.parameters["source_log_hash"] = hex64(scores.source_log_hash);
  subset.parameters["metric"] = scores.metric;
}

}  // namespace

void validate_target(const SelectionTarget& target) {
  if (target.total_count.has_value() == target.per_class.has_value())
    throw ConfigError("selection target needs exactly one of total_count or per_class");
  if (target.total_count && *target.total_count < 1)
    throw ConfigError("total_count must be >= 1");
  if (target.per_class && *target.per_class < 1) throw ConfigError("per_class must be >= 1");
}

void validate_subset(const SubsetIndex& subset, long n) {
  long prev = -1;
  for (long idx : subset.indices) {
    if (idx < 0 || idx >= n)
      throw ConfigError("subset index " + std::to_string(idx) + " is outside [0, " +
                        std::to_string(n) + ")");
    if (idx <= prev) throw ConfigError("subset indices are not strictly increasing");
    prev = idx;
  }
  if (subset.per_class_counts.size() > 0 &&
      subset.per_class_counts.sum() != static_cast<int>(subset.indices.size()))
    throw ConfigError("per-class counts sum to " + std::to_string(subset.per_class_counts.sum()) +
                      " but subset has " + std::to_string(subset.indices.size()) + " indices");
}

void attach_class_counts(SubsetIndex& subset, const Eigen::VectorXi& labels, int num_classes) {
  subset.per_class_counts = Eigen::VectorXi::Zero(num_classes);
  for (long idx : subset.indices) {
    if (idx < 0 || idx >= labels.size())
      throw ConfigError("subset index " + std::to_string(idx) + " has no label");
    subset.per_class_counts[labels[idx]] += 1;
  }
}

SubsetIndex rank_select(const ScoreVector& scores, const Eigen::VectorXi& labels,
                        int num_classes, long total_count, Prefer prefer) {
  check_scores_labels(scores, labels, num_classes);
  if (total_count < 1) throw ConfigError("total_count must be >= 1");
  if (total_count > scores.size())
    throw InfeasibleError("requested " + std::to_string(total_count) + " samples from " +
                          std::to_string(scores.size()));

  std::vector<long> order = preferred_order(scores, prefer);
  SubsetIndex subset;
  subset.method = "rank";
  subset.indices.assign(order.begin(), order.begin() + total_count);
  subset.parameters["count"] = std::to_string(total_count);
  subset.parameters["prefer"] = prefer_name(prefer);
  finish(subset, scores, labels, num_classes);
  return subset;
}

SubsetIndex balanced_select(const ScoreVector& scores, const Eigen::VectorXi& labels,
                            int num_classes, long per_class, bool clamp_deficient,
                            Prefer prefer) {
  check_scores_labels(scores, labels, num_classes);
  if (per_class < 1) throw ConfigError("per_class must be >= 1");

  std::vector<std::vector<long>> members(num_classes);
  for (long i : preferred_order(scores, prefer)) members[labels[i]].push_back(i);

  std::string deficit;
  for (int k = 0; k < num_classes; ++k) {
    if (static_cast<long>(members[k].size()) < per_class) {
      if (!deficit.empty()) deficit += "; ";
      deficit += "class " + std::to_string(k) + " has " + std::to_string(members[k].size()) +
                 " samples (< " + std::to_string(per_class) + ")";
    }
  }

  SubsetIndex subset;
  subset.method = "balanced";
  subset.parameters["per_class"] = std::to_string(per_class);
  subset.parameters["prefer"] = prefer_name(prefer);

  if (!deficit.empty()) {
    if (!clamp_deficient) throw InfeasibleError("balanced selection infeasible: " + deficit);
    std::string clamped;
    for (int k = 0; k < num_classes; ++k) {
      if (static_cast<long>(members[k].size()) < per_class) {
        if (!clamped.empty()) clamped += ",";
        clamped += std::to_string(k) + ":" + std::to_string(members[k].size());
      }
    }
    subset.parameters["clamped_classes"] = clamped;
  }

  for (int k = 0; k < num_classes; ++k) {
    const long take = std::min<long>(per_class, static_cast<long>(members[k].size()));
    subset.indices.insert(subset.indices.end(), members[k].begin(), members[k].begin() + take);
  }
  finish(subset, scores, labels, num_classes);
  return subset;
}

SubsetIndex ccs_select(const ScoreVector& scores, const Eigen::VectorXi& labels,
                       int num_classes, long total_count, double hard_cutoff, int num_strata,
                       std::uint64_t seed) {
  check_scores_labels(scores, labels, num_classes);
  if (total_count < 1) throw ConfigError("total_count must be >= 1");
  if (hard_cutoff < 0.0 || hard_cutoff >= 1.0) throw ConfigError("hard_cutoff must lie in [0, 1)");
  if (num_strata < 1) throw ConfigError("num_strata must be >= 1");

  const long n = scores.size();
  if (num_strata == 1 && hard_cutoff == 0.0) {
    // degenerate stratification: one bin over everything is a uniform draw
    SubsetIndex subset = random_select(n, total_count, seed);
    subset.method = "ccs";
    subset.parameters["hard_cutoff"] = std::to_string(hard_cutoff);
    subset.parameters["num_strata"] = std::to_string(num_strata);
    finish(subset, scores, labels, num_classes);
    return subset;
  }
  const long drop = std::llround(hard_cutoff * static_cast<double>(n));
  std::vector<long> hardest_first = preferred_order(scores, Prefer::hard);
  std::vector<long> survivors(hardest_first.begin() + drop, hardest_first.end());
  if (total_count > static_cast<long>(survivors.size()))
    throw InfeasibleError("budget " + std::to_string(total_count) + " exceeds the " +
                          std::to_string(survivors.size()) + " samples surviving the cutoff");

  double lo = scores.scores[survivors.front()];
  double hi = lo;
  for (long i : survivors) {
    lo = std::min(lo, scores.scores[i]);
    hi = std::max(hi, scores.scores[i]);
  }
  const double width = hi - lo;

  std::vector<std::vector<long>> bins(num_strata);
  for (long i : survivors) {
    int b = 0;
    if (width > 0.0) {
      b = static_cast<int>((scores.scores[i] - lo) / width * num_strata);
      b = std::clamp(b, 0, num_strata - 1);
    }
    bins[b].push_back(i);
  }
  for (auto& bin : bins) std::sort(bin.begin(), bin.end());

  // Budget spread: smallest nonempty bin first, each takes an even share of
  // what remains; small bins hand their surplus to the larger ones.
  std::vector<int> bin_order;
  for (int b = 0; b < num_strata; ++b)
    if (!bins[b].empty()) bin_order.push_back(b);
  std::stable_sort(bin_order.begin(), bin_order.end(),
                   [&](int a, int b) { return bins[a].size() < bins[b].size(); });

  SubsetIndex subset;
  subset.method = "ccs";
  long remaining = total_count;
  long bins_left = static_cast<long>(bin_order.size());
  for (int b : bin_order) {
    const long share = (remaining + bins_left - 1) / bins_left;  // ceil
    const long take = std::min<long>(static_cast<long>(bins[b].size()), share);
    std::vector<long> pool = bins[b];
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(b)));
    std::shuffle(pool.begin(), pool.end(), rng);
    subset.indices.insert(subset.indices.end(), pool.begin(), pool.begin() + take);
    remaining -= take;
    --bins_left;
  }

  subset.parameters["count"] = std::to_string(total_count);
  subset.parameters["hard_cutoff"] = std::to_string(hard_cutoff);
  subset.parameters["num_strata"] = std::to_string(num_strata);
  subset.parameters["seed"] = std::to_string(seed);
  finish(subset, scores, labels, num_classes);
  return subset;
}

SubsetIndex random_select(long n_total, long total_count, std::uint64_t seed) {
  if (n_total < 1) throw ConfigError("n_total must be >= 1");
  if (total_count < 1) throw ConfigError("total_count must be >= 1");
  if (total_count > n_total)
    throw InfeasibleError("requested " + std::to_string(total_count) + " samples from " +
                          std::to_string(n_total));
  std::vector<long> order(n_total);
  std::iota(order.begin(), order.end(), 0L);
  std::mt19937_64 rng(mix_seed(seed, 0x5e1ec7));
  std::shuffle(order.begin(), order.end(), rng);

  SubsetIndex subset;
  subset.method = "random";
  subset.indices.assign(order.begin(), order.begin() + total_count);
  std::sort(subset.indices.begin(), subset.indices.end());
  subset.parameters["count"] = std::to_string(total_count);
  subset.parameters["seed"] = std::to_string(seed);
  return subset;
}

std::pair<SubsetIndex, SubsetIndex> as_easy_hard_split(const ScoreVector& scores,
                                                       const Eigen::VectorXi& labels,
                                                       int num_classes, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("ratio must lie in (0, 1)");
  const long n = scores.size();
  const long keep = std::llround((1.0 - ratio) * static_cast<double>(n));
  if (keep <= 0 || keep >= n)
    throw ConfigError("ratio " + std::to_string(ratio) + " keeps " + std::to_string(keep) +
                      " of " + std::to_string(n) + " samples; nothing to compare");
  auto easy = rank_select(scores, labels, num_classes, keep, Prefer::easy);
  auto hard = rank_select(scores, labels, num_classes, keep, Prefer::hard);
  easy.parameters["ratio"] = std::to_string(ratio);
  hard.parameters["ratio"] = std::to_string(ratio);
  return {std::move(easy), std::move(hard)};
}

void write_subset(const SubsetIndex& subset, const std::string& csv_path) {
  {
    std::ofstream out(csv_path);
    if (!out) throw IoError("cannot open '" + csv_path + "' for writing");
    out << "sample_index\n";
    for (long idx : subset.indices) out << idx << "\n";
    if (!out) throw IoError("write to '" + csv_path + "' failed");
  }
  nlohmann::json side;
  side["method"] = subset.method;
  side["count"] = subset.indices.size();
  side["parameters"] = subset.parameters;
  side["per_class_counts"] = std::vector<int>(
      subset.per_class_counts.data(), subset.per_class_counts.data() + subset.per_class_counts.size());
  std::ofstream out(csv_path + ".json");
  if (!out) throw IoError("cannot open '" + csv_path + ".json' for writing");
  out << side.dump(2) << "\n";
  if (!out) throw IoError("write to '" + csv_path + ".json' failed");
}

SubsetIndex read_subset(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot open '" + csv_path + "'");
  SubsetIndex subset;
  std::string line;
  bool saw_header = false;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string cell = line;
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    if (cell.empty() || cell[0] == '#') continue;
    if (!saw_header) {
      if (cell != "sample_index")
        throw IoError("'" + csv_path + "' line " + std::to_string(line_no) +
                      ": expected 'sample_index' header");
      saw_header = true;
      continue;
    }
    long idx = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), idx);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
      throw IoError("'" + csv_path + "' line " + std::to_string(line_no) + ": bad index '" +
                    cell + "'");
    subset.indices.push_back(idx);
  }
  if (!saw_header) throw IoError("'" + csv_path + "' contains no subset header");

  std::ifstream side(csv_path + ".json");
  if (side) {
    nlohmann::json j;
    try {
      side >> j;
    } catch (const nlohmann::json::exception& e) {
      throw IoError("'" + csv_path + ".json' is not valid JSON: " + e.what());
    }
    subset.method = j.value("method", "");
    if (j.contains("parameters"))
      for (auto& [key, val] : j["parameters"].items())
        subset.parameters[key] = val.get<std::string>();
    if (j.contains("per_class_counts")) {
      auto counts = j["per_class_counts"].get<std::vector<int>>();
      subset.per_class_counts = Eigen::Map<Eigen::VectorXi>(counts.data(),
                                                            static_cast<long>(counts.size()));
    }
  }
  return subset;
}

}  // namespace yoco
