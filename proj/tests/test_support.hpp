#pragma once

#include "yoco/dataset.hpp"
#include "yoco/dynamics_log.hpp"
#include "yoco/evaluation.hpp"
#include "yoco/nn.hpp"
#include "yoco/scoring.hpp"
#include "yoco/selection.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace yt {

// Self-cleaning scratch directory for file round-trip tests.
struct scratch_dir {
  std::filesystem::path dir;

  explicit scratch_dir(const std::string& tag) {
    dir = std::filesystem::temp_directory_path() / ("yoco_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
  }
  ~scratch_dir() {
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

inline std::vector<unsigned char> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in),
                                    std::istreambuf_iterator<char>());
}

inline std::string slurp_text(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

// Hand-built dynamics log used by the frozen scoring tests. Logits sit on a
// 0.25 grid so the f32 storage is exact; labels [0,1,2,0]; per-epoch
// accuracies 0.75, 1.0, 0.75 (sample 3 is only right in epoch 1).
inline yoco::DynamicsLog hand_log() {
  yoco::DynamicsLog log;
  log.num_samples = 4;
  log.num_classes = 3;
  log.labels = {0, 1, 2, 0};
  log.loss_kind = yoco::LossKind::cross_entropy;
  log.seed = 99;
  const float raw[3][4][3] = {
      {{1.0f, 0.25f, -0.5f}, {0.25f, 0.75f, 0.0f}, {-0.25f, 0.5f, 1.25f}, {0.0f, 1.0f, 0.5f}},
      {{1.5f, 0.0f, -0.75f}, {0.0f, 1.25f, 0.25f}, {0.25f, -0.5f, 1.5f}, {0.75f, 0.5f, -0.25f}},
      {{1.25f, 0.5f, 0.25f}, {0.5f, 1.0f, 0.75f}, {0.0f, 0.25f, 0.75f}, {0.25f, 1.25f, 0.0f}},
  };
  const float accs[3] = {0.75f, 1.0f, 0.75f};
  for (int e = 0; e < 3; ++e) {
    yoco::EpochRecord rec;
    rec.accuracy = accs[e];
    rec.mean_loss = 0.5f + 0.1f * static_cast<float>(e);
    rec.logits.resize(4, 3);
    for (int i = 0; i < 4; ++i)
      for (int c = 0; c < 3; ++c) rec.logits(i, c) = raw[e][i][c];
    log.epochs.push_back(rec);
  }
  return log;
}

// Random well-formed log for round-trip and property tests.
inline yoco::DynamicsLog random_log(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_dist(1, 6), c_dist(2, 4), e_dist(1, 4);
  std::uniform_real_distribution<float> logit(-3.0f, 3.0f);
  std::uniform_real_distribution<float> unit(0.0f, 1.0f);
  yoco::DynamicsLog log;
  log.num_samples = static_cast<std::uint32_t>(n_dist(rng));
  log.num_classes = static_cast<std::uint32_t>(c_dist(rng));
  log.loss_kind = (rng() & 1) ? yoco::LossKind::mse : yoco::LossKind::cross_entropy;
  log.seed = rng();
  std::uniform_int_distribution<std::uint32_t> lab(0, log.num_classes - 1);
  for (std::uint32_t i = 0; i < log.num_samples; ++i) log.labels.push_back(lab(rng));
  const int epochs = e_dist(rng);
  for (int e = 0; e < epochs; ++e) {
    yoco::EpochRecord rec;
    rec.accuracy = unit(rng);
    rec.mean_loss = unit(rng) * 3.0f;
    rec.logits.resize(log.num_samples, log.num_classes);
    for (long i = 0; i < rec.logits.rows(); ++i)
      for (long c = 0; c < rec.logits.cols(); ++c) rec.logits(i, c) = logit(rng);
    log.epochs.push_back(rec);
  }
  return log;
}

// Independent forward pass: plain loops, no Eigen expressions, so the main
// implementation and this oracle share no code.
inline std::vector<std::vector<double>> oracle_forward(const yoco::Mlp<double>& net,
                                                       const std::vector<std::vector<double>>& x) {
  std::vector<std::vector<double>> act = x;
  for (long l = 0; l < net.num_layers(); ++l) {
    const auto& w = net.weights[l];
    const auto& b = net.biases[l];
    std::vector<std::vector<double>> next(act.size(), std::vector<double>(w.rows(), 0.0));
    for (std::size_t i = 0; i < act.size(); ++i)
      for (long r = 0; r < w.rows(); ++r) {
        double acc = b[r];
        for (long c = 0; c < w.cols(); ++c) acc += w(r, c) * act[i][c];
        if (l + 1 < net.num_layers() && acc < 0.0) acc = 0.0;
        next[i][r] = acc;
      }
    act = std::move(next);
  }
  return act;
}

// Independent softmax-error-norm oracle used against lbpe_per_epoch.
inline double oracle_error_norm(const std::vector<double>& logits, int label) {
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  double z = 0.0;
  for (double v : logits) z += std::exp(v - mx);
  double sum = 0.0;
  for (std::size_t c = 0; c < logits.size(); ++c) {
    const double p = std::exp(logits[c] - mx) / z;
    const double d = p - (static_cast<int>(c) == label ? 1.0 : 0.0);
    sum += d * d;
  }
  return std::sqrt(sum);
}

inline double oracle_entropy(const std::vector<double>& logits) {
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  double z = 0.0;
  for (double v : logits) z += std::exp(v - mx);
  double h = 0.0;
  for (double v : logits) {
    const double p = std::exp(v - mx) / z;
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

// Brute-force balanced oracle: per class, repeatedly linear-scan for the
// best remaining sample. prefer=easy keeps the lowest effective score.
inline std::vector<long> oracle_balanced(const yoco::ScoreVector& scores,
                                         const Eigen::VectorXi& labels, int num_classes,
                                         long per_class, yoco::Prefer prefer) {
  const bool flip = (scores.direction == yoco::ScoreDirection::higher_is_easier) !=
                    (prefer == yoco::Prefer::hard);
  std::vector<long> picked;
  for (int cls = 0; cls < num_classes; ++cls) {
    std::vector<long> members;
    for (long i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) members.push_back(i);
    std::vector<bool> used(members.size(), false);
    for (long m = 0; m < per_class; ++m) {
      long best = -1;
      for (std::size_t r = 0; r < members.size(); ++r) {
        if (used[r]) continue;
        if (best < 0) {
          best = static_cast<long>(r);
          continue;
        }
        const double sv = flip ? -scores.scores[members[r]] : scores.scores[members[r]];
        const double sb = flip ? -scores.scores[members[best]] : scores.scores[members[best]];
        if (sv < sb) best = static_cast<long>(r);
      }
      used[best] = true;
      picked.push_back(members[best]);
    }
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

// CLI subprocess driver. The test harness exports YOCO_CLI with the binary
// path; commands run inside `workdir` with stdout/stderr captured to files.
struct cli_result {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline const char* cli_path() { return std::getenv("YOCO_CLI"); }

inline cli_result run_cli(const std::string& args, const std::string& workdir,
                          const std::string& env_prefix = "") {
  cli_result res;
  const std::string out_file = workdir + "/.cli_out";
  const std::string err_file = workdir + "/.cli_err";
  std::string cmd = "cd '" + workdir + "' && " + env_prefix + " '" + cli_path() + "' " + args +
                    " > '" + out_file + "' 2> '" + err_file + "'";
  const int rc = std::system(cmd.c_str());
  res.exit_code = (rc >= 0 && WIFEXITED(rc)) ? WEXITSTATUS(rc) : -1;
  res.out = slurp_text(out_file);
  res.err = slurp_text(err_file);
  std::remove(out_file.c_str());
  std::remove(err_file.c_str());
  return res;
}

}  // namespace yt
