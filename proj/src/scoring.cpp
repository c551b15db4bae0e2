#include "yoco/scoring.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

namespace yoco {

namespace {

void require_epochs(const DynamicsLog& log) {
  if (log.epochs.empty()) throw ConfigError("log has no recorded epochs to score");
}

VectorX<double> softmax_row_d(const MatrixRXf& logits, long row) {
  VectorX<double> p = logits.row(row).cast<double>().transpose();
  const double m = p.maxCoeff();
  // scalar exp so saturated tails underflow to exact zero (vectorized exp
  // returns subnormals, which would leave one-hot rows with nonzero entropy)
  for (long c = 0; c < p.size(); ++c) p[c] = std::exp(p[c] - m);
  p /= p.sum();
  return p;
}

long argmax_lowest(const MatrixRXf& m, long row) {
  long best = 0;
  for (long c = 1; c < m.cols(); ++c)
    if (m(row, c) > m(row, best)) best = c;
  return best;
}

ScoreVector make_scores(const DynamicsLog& log, std::string metric, ScoreDirection direction) {
  ScoreVector sv;
  sv.metric = std::move(metric);
  sv.direction = direction;
  sv.source_log_hash = log_digest(log);
  sv.scores = VectorX<double>::Zero(log.num_samples);
  return sv;
}

const char* direction_name(ScoreDirection d) {
  return d == ScoreDirection::lower_is_easier ? "lower_is_easier" : "higher_is_easier";
}

}  // namespace

VectorX<double> lbpe_per_epoch(const DynamicsLog& log, int epoch, bool raw_logits) {
  require_epochs(log);
  if (epoch < 0 || epoch >= static_cast<int>(log.num_epochs()))
    throw ConfigError("epoch " + std::to_string(epoch) + " is outside [0, " +
                      std::to_string(log.num_epochs()) + ")");
  const MatrixRXf& logits = log.epochs[epoch].logits;
  const long n = logits.rows();
  VectorX<double> out(n);
  for (long i = 0; i < n; ++i) {
    VectorX<double> p = raw_logits ? VectorX<double>(logits.row(i).cast<double>().transpose())
                                   : softmax_row_d(logits, i);
    p[log.labels[i]] -= 1.0;
    out[i] = p.norm();
  }
  return out;
}

std::vector<int> topk_epochs(const std::vector<double>& accuracies, int k) {
  const int e = static_cast<int>(accuracies.size());
  if (k < 1) throw ConfigError("topk_epochs needs k >= 1");
  if (k > e)
    throw ConfigError("topk_epochs: k=" + std::to_string(k) + " exceeds " + std::to_string(e) +
                      " epochs");
  std::vector<int> order(e);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (accuracies[a] != accuracies[b]) return accuracies[a] > accuracies[b];
    return a < b;  // tie: earlier epoch wins
  });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

ScoreVector lbpe_score(const DynamicsLog& log, int early_epochs, int k, bool raw_logits) {
  require_epochs(log);
  const int e = static_cast<int>(log.num_epochs());
  if (early_epochs < 1 || early_epochs > e)
    throw ConfigError("early_epochs=" + std::to_string(early_epochs) + " is outside [1, " +
                      std::to_string(e) + "]");
  if (k < 1) throw ConfigError("k must be >= 1");

  ScoreVector sv = make_scores(log, "lbpe", ScoreDirection::lower_is_easier);
  int k_used = k;
  if (k > early_epochs) {
    k_used = early_epochs;
    sv.warnings.push_back("k=" + std::to_string(k) + " clamped to " + std::to_string(k_used) +
                          " (only " + std::to_string(early_epochs) + " early epochs)");
  }

  std::vector<double> accuracies(early_epochs);
  for (int t = 0; t < early_epochs; ++t) accuracies[t] = log.epochs[t].accuracy;
  sv.epochs_used = topk_epochs(accuracies, k_used);

  for (int t : sv.epochs_used) sv.scores += lbpe_per_epoch(log, t, raw_logits);
  sv.scores /= static_cast<double>(sv.epochs_used.size());
  return sv;
}

ScoreVector el2n_score(const DynamicsLog& log, int first_n) {
  require_epochs(log);
  const int e = static_cast<int>(log.num_epochs());
  if (first_n < 1 || first_n > e)
    throw ConfigError("first_n=" + std::to_string(first_n) + " is outside [1, " +
                      std::to_string(e) + "]");
  ScoreVector sv = make_scores(log, "el2n", ScoreDirection::lower_is_easier);
  for (int t = 0; t < first_n; ++t) {
    sv.scores += lbpe_per_epoch(log, t);
    sv.epochs_used.push_back(t);
  }
  sv.scores /= static_cast<double>(first_n);
  return sv;
}

ScoreVector forgetting_score(const DynamicsLog& log) {
  require_epochs(log);
  const int e = static_cast<int>(log.num_epochs());
  const long n = log.num_samples;
  ScoreVector sv = make_scores(log, "forgetting", ScoreDirection::lower_is_easier);
  for (int t = 0; t < e; ++t) sv.epochs_used.push_back(t);

  for (long i = 0; i < n; ++i) {
    int events = 0;
    bool prev = false;
    bool ever = false;
    for (int t = 0; t < e; ++t) {
      const bool now =
          argmax_lowest(log.epochs[t].logits, i) == static_cast<long>(log.labels[i]);
      if (t > 0 && prev && !now) ++events;
      ever = ever || now;
      prev = now;
    }
    sv.scores[i] = ever ? static_cast<double>(events) : static_cast<double>(e);
  }
  return sv;
}

ScoreVector aum_score(const DynamicsLog& log) {
  require_epochs(log);
  if (log.num_classes < 2) throw ConfigError("margin needs at least 2 classes");
  const int e = static_cast<int>(log.num_epochs());
  const long n = log.num_samples;
  ScoreVector sv = make_scores(log, "aum", ScoreDirection::higher_is_easier);
  for (int t = 0; t < e; ++t) sv.epochs_used.push_back(t);

  for (long i = 0; i < n; ++i) {
    double total = 0.0;
    for (int t = 0; t < e; ++t) {
      const MatrixRXf& logits = log.epochs[t].logits;
      const long y = log.labels[i];
      double other = -std::numeric_limits<double>::infinity();
      for (long c = 0; c < logits.cols(); ++c)
        if (c != y) other = std::max(other, static_cast<double>(logits(i, c)));
      total += static_cast<double>(logits(i, y)) - other;
    }
    sv.scores[i] = total / static_cast<double>(e);
  }
  return sv;
}

ScoreVector entropy_score(const DynamicsLog& log) {
  require_epochs(log);
  const long n = log.num_samples;
  ScoreVector sv = make_scores(log, "entropy", ScoreDirection::lower_is_easier);
  const int last = static_cast<int>(log.num_epochs()) - 1;
  sv.epochs_used.push_back(last);
  for (long i = 0; i < n; ++i) {
    VectorX<double> p = softmax_row_d(log.epochs[last].logits, i);
    double h = 0.0;
    for (long c = 0; c < p.size(); ++c)
      if (p[c] > 0.0) h -= p[c] * std::log(p[c]);
    sv.scores[i] = h;
  }
  return sv;
}

ScoreVector ssp_distance_score(const MatrixRXf& features, const Eigen::VectorXi& labels,
                               int clusters_per_class, std::uint64_t seed) {
  const long n = features.rows();
  if (n < 1) throw ConfigError("no feature rows to cluster");
  if (labels.size() != n)
    throw ConfigError("feature rows and labels disagree: " + std::to_string(n) + " vs " +
                      std::to_string(labels.size()));
  if (clusters_per_class < 1) throw ConfigError("clusters_per_class must be >= 1");

  int num_classes = 0;
  for (long i = 0; i < n; ++i) {
    if (labels[i] < 0) throw ConfigError("negative label at row " + std::to_string(i));
    num_classes = std::max(num_classes, labels[i] + 1);
  }

  ScoreVector sv;
  sv.metric = "ssp_distance";
  sv.direction = ScoreDirection::lower_is_easier;
  sv.scores = VectorX<double>::Zero(n);

  const MatrixRXd x = features.cast<double>();
  for (int cls = 0; cls < num_classes; ++cls) {
    std::vector<long> rows;
    for (long i = 0; i < n; ++i)
      if (labels[i] == cls) rows.push_back(i);
    if (rows.empty()) continue;
    const int k = clusters_per_class;
    if (static_cast<long>(rows.size()) < k)
      throw InfeasibleError("class " + std::to_string(cls) + " has " +
                            std::to_string(rows.size()) + " samples, fewer than " +
                            std::to_string(k) + " clusters");

    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(cls)));

    // k-means++ seeding over this class's rows.
    std::vector<long> centers;  // indices into rows
    std::uniform_int_distribution<long> uniform(0, static_cast<long>(rows.size()) - 1);
    centers.push_back(uniform(rng));
    std::vector<double> dist2(rows.size(), std::numeric_limits<double>::infinity());
    while (static_cast<int>(centers.size()) < k) {
      const long latest = centers.back();
      double total = 0.0;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const double d2 = (x.row(rows[r]) - x.row(rows[latest])).squaredNorm();
        dist2[r] = std::min(dist2[r], d2);
        total += dist2[r];
      }
      long pick;
      if (total > 0.0) {
        std::discrete_distribution<long> weighted(dist2.begin(), dist2.end());
        pick = weighted(rng);
      } else {
        pick = uniform(rng);  // all points coincide with a center
      }
      centers.push_back(pick);
    }

    MatrixRXd centroids(k, x.cols());
    for (int c = 0; c < k; ++c) centroids.row(c) = x.row(rows[centers[c]]);

    std::vector<int> assign(rows.size(), 0);
    for (int iter = 0; iter < 100; ++iter) {
      for (std::size_t r = 0; r < rows.size(); ++r) {
        int best = 0;
        double best_d2 = (x.row(rows[r]) - centroids.row(0)).squaredNorm();
        for (int c = 1; c < k; ++c) {
          const double d2 = (x.row(rows[r]) - centroids.row(c)).squaredNorm();
          if (d2 < best_d2) {
            best_d2 = d2;
            best = c;
          }
        }
        assign[r] = best;
      }
      MatrixRXd fresh = MatrixRXd::Zero(k, x.cols());
      std::vector<long> counts(k, 0);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        fresh.row(assign[r]) += x.row(rows[r]);
        counts[assign[r]] += 1;
      }
      double moved = 0.0;
      for (int c = 0; c < k; ++c) {
        if (counts[c] == 0) continue;  // empty cluster keeps its centroid
        fresh.row(c) /= static_cast<double>(counts[c]);
        moved = std::max(moved, (fresh.row(c) - centroids.row(c)).norm());
        centroids.row(c) = fresh.row(c);
      }
      if (moved < 1e-6) break;
    }

    for (std::size_t r = 0; r < rows.size(); ++r)
      sv.scores[rows[r]] = (x.row(rows[r]) - centroids.row(assign[r])).norm();
  }
  return sv;
}

void write_scores_csv(const ScoreVector& scores, const std::string& path,
                      const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "sample_index,score,metric,direction\n";
  char buf[64];
  for (long i = 0; i < scores.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", scores.scores[i]);
    out << i << "," << buf << "," << scores.metric << "," << direction_name(scores.direction)
        << "\n";
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

ScoreVector read_scores_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  std::vector<double> values;
  std::string metric;
  std::string direction;
  bool saw_header = false;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      if (line.rfind("sample_index,", 0) != 0)
        throw IoError("'" + path + "' line " + std::to_string(line_no) +
                      ": expected scores header");
      saw_header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string idx_s, score_s, metric_s, dir_s;
    if (!std::getline(ss, idx_s, ',') || !std::getline(ss, score_s, ',') ||
        !std::getline(ss, metric_s, ',') || !std::getline(ss, dir_s))
      throw IoError("'" + path + "' line " + std::to_string(line_no) + ": malformed score row");
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(score_s.data(), score_s.data() + score_s.size(), value);
    if (ec != std::errc() || ptr != score_s.data() + score_s.size())
      throw IoError("'" + path + "' line " + std::to_string(line_no) + ": bad score '" +
                    score_s + "'");
    const long expect = static_cast<long>(values.size());
    if (std::to_string(expect) != idx_s)
      throw IoError("'" + path + "' line " + std::to_string(line_no) + ": sample index '" +
                    idx_s + "' out of order (expected " + std::to_string(expect) + ")");
    values.push_back(value);
    if (metric.empty()) metric = metric_s;
    if (direction.empty()) direction = dir_s;
  }
  if (!saw_header || values.empty())
    throw IoError("'" + path + "' contains no score rows");

  ScoreVector sv;
  sv.scores = Eigen::Map<VectorX<double>>(values.data(), static_cast<long>(values.size()));
  sv.metric = metric;
  if (direction == "higher_is_easier")
    sv.direction = ScoreDirection::higher_is_easier;
  else if (direction == "lower_is_easier")
    sv.direction = ScoreDirection::lower_is_easier;
  else
    throw IoError("'" + path + "' has unknown direction '" + direction + "'");
  return sv;
}

}  // namespace yoco
