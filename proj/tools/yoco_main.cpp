// Subcommand front-end for the pruning pipeline:
//   train -> score -> select -> evaluate / sweep
// Every stage is file-mediated (YDLG log, scores CSV, subset CSV) so stages
// can be rerun or replaced independently. Exit codes: 0 ok, 2 config,
// 3 I/O, 4 numeric failure, 5 infeasible selection.

#include "yoco/dataset.hpp"
#include "yoco/dynamics_log.hpp"
#include "yoco/evaluation.hpp"
#include "yoco/nn.hpp"
#include "yoco/scoring.hpp"
#include "yoco/selection.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr std::uint64_t kUnsetSeed = ~0ULL;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = text.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(text.substr(start));
      break;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

// Apply "key = value" lines to a parsed subcommand. Flags given on the
// command line win; unknown keys are an error, not a shrug.
void apply_config_file(CLI::App* cmd, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw yoco::IoError("cannot read config file '" + path + "'");
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw yoco::ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (key.empty() || key == "config")
      throw yoco::ConfigError(path + ":" + std::to_string(line_no) + ": bad key '" + key + "'");
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (opt == nullptr)
      throw yoco::ConfigError("unknown config key '" + key + "' in " + path);
    if (opt->count() > 0) continue;  // command line wins
    opt->add_result(value);
    opt->run_callback();
  }
}

long parse_long(const std::string& text, const std::string& what) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw yoco::ConfigError(what + " '" + text + "' is not an integer");
  return v;
}

double parse_real(const std::string& text, const std::string& what) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw yoco::ConfigError(what + " '" + text + "' is not a number");
  return v;
}

std::uint64_t parse_seed_value(const std::string& text, const std::string& what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw yoco::ConfigError(what + " '" + text + "' is not a non-negative integer");
  return v;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const std::string& part : split(text, ','))
    seeds.push_back(parse_seed_value(part, "seed"));
  if (seeds.empty()) throw yoco::ConfigError("empty seed list");
  return seeds;
}

// "0.1:0.9:0.1" (inclusive range) or "0.1,0.3,0.5".
std::vector<double> parse_ratios(const std::string& text) {
  std::vector<double> ratios;
  if (text.find(':') != std::string::npos) {
    auto parts = split(text, ':');
    if (parts.size() != 3) throw yoco::ConfigError("ratio range must be start:end:step");
    const double start = parse_real(parts[0], "ratio start");
    const double end = parse_real(parts[1], "ratio end");
    const double step = parse_real(parts[2], "ratio step");
    if (!(step > 0) || end < start) throw yoco::ConfigError("ratio range must ascend");
    const long count = std::lround((end - start) / step);
    for (long i = 0; i <= count; ++i) {
      const double r = start + static_cast<double>(i) * step;
      if (r <= end + 1e-9) ratios.push_back(r);
    }
  } else {
    for (const std::string& part : split(text, ','))
      ratios.push_back(parse_real(part, "ratio"));
  }
  if (ratios.empty()) throw yoco::ConfigError("no ratios given");
  return ratios;
}

// ---------------------------------------------------------------------------
// Shared flag groups

struct DataFlags {
  std::string csv;
  std::string label_column = "label";
  std::string ytf, ytl;
  std::string blobs;
  std::string image_shape;
  int multiformation = 1;
};

void add_data_flags(CLI::App* cmd, DataFlags& f, const char* role) {
  cmd->add_option("--csv", f.csv, std::string(role) + ": CSV file with a header row");
  cmd->add_option("--label-column", f.label_column, "label column name or 0-based index");
  cmd->add_option("--ytf", f.ytf, std::string(role) + ": YTF1 tensor file");
  cmd->add_option("--ytl", f.ytl, "YTL1 label file (with --ytf)");
  cmd->add_option("--blobs", f.blobs,
                  std::string(role) + ": synthetic blobs, e.g. c=4,n=500,d=8,sep=4,std=1,noise=0.1");
  cmd->add_option("--image-shape", f.image_shape, "attach CxHxW image shape to the features");
  cmd->add_option("--multiformation", f.multiformation,
                  "decode each image into n^2 upscaled patches (1 = off)");
}

yoco::BlobSpec parse_blob_spec(const std::string& text) {
  yoco::BlobSpec spec;
  for (const std::string& part : split(text, ',')) {
    auto kv = split(part, '=');
    if (kv.size() != 2) throw yoco::ConfigError("blob spec entry '" + part + "' is not key=value");
    const std::string& key = kv[0];
    const std::string& val = kv[1];
    if (key == "c")
      spec.num_classes = static_cast<int>(parse_long(val, "blob classes"));
    else if (key == "n")
      spec.samples_per_class = static_cast<int>(parse_long(val, "blob samples per class"));
    else if (key == "d")
      spec.dim = static_cast<int>(parse_long(val, "blob dim"));
    else if (key == "sep")
      spec.center_separation = parse_real(val, "blob separation");
    else if (key == "std")
      spec.noise_std = parse_real(val, "blob std");
    else if (key == "noise")
      spec.label_noise_rate = parse_real(val, "blob label noise");
    else
      throw yoco::ConfigError("unknown blob spec key '" + key + "'");
  }
  return spec;
}

yoco::Dataset build_dataset(const DataFlags& f, std::uint64_t seed) {
  int sources = 0;
  if (!f.csv.empty()) ++sources;
  if (!f.ytf.empty()) ++sources;
  if (!f.blobs.empty()) ++sources;
  if (sources != 1)
    throw yoco::ConfigError("need exactly one dataset source: --csv, --ytf, or --blobs");

  yoco::Dataset data;
  if (!f.csv.empty()) {
    data = yoco::load_csv(f.csv, f.label_column);
  } else if (!f.ytf.empty()) {
    if (f.ytl.empty()) throw yoco::ConfigError("--ytf needs --ytl for the labels");
    data = yoco::load_ytf(f.ytf, f.ytl);
  } else {
    data = yoco::generate_blobs(parse_blob_spec(f.blobs), seed);
  }

  if (!f.image_shape.empty()) {
    auto parts = split(f.image_shape, 'x');
    if (parts.size() != 3) throw yoco::ConfigError("--image-shape must be CxHxW");
    yoco::ImageShape shape{static_cast<int>(parse_long(parts[0], "channels")),
                           static_cast<int>(parse_long(parts[1], "height")),
                           static_cast<int>(parse_long(parts[2], "width"))};
    if (shape.pixels() != data.dim())
      throw yoco::ConfigError("--image-shape " + f.image_shape + " does not cover " +
                              std::to_string(data.dim()) + " features");
    data.image_shape = shape;
  }
  if (f.multiformation < 1) throw yoco::ConfigError("--multiformation must be >= 1");
  if (f.multiformation > 1) data = yoco::multiformation_decode(data, f.multiformation);
  return data;
}

void describe_data_flags(std::map<std::string, std::string>& kv, const DataFlags& f,
                         const std::string& prefix) {
  kv[prefix + "csv"] = f.csv;
  kv[prefix + "label-column"] = f.label_column;
  kv[prefix + "ytf"] = f.ytf;
  kv[prefix + "ytl"] = f.ytl;
  kv[prefix + "blobs"] = f.blobs;
  kv[prefix + "image-shape"] = f.image_shape;
  kv[prefix + "multiformation"] = std::to_string(f.multiformation);
}

struct TrainFlags {
  int epochs = 30;
  int batch_size = 64;
  double lr = 0.01;
  double momentum = 0.9;
  double weight_decay = 0.0005;
  std::string milestones;  // "" = auto, "none" = never decay, else comma list
  double gamma = 0.1;
  std::string loss = "cross_entropy";
  std::string hidden = "16";
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--epochs", f.epochs, "training epochs");
  cmd->add_option("--batch-size", f.batch_size, "minibatch size");
  cmd->add_option("--lr", f.lr, "learning rate");
  cmd->add_option("--momentum", f.momentum, "SGD momentum");
  cmd->add_option("--weight-decay", f.weight_decay, "L2 penalty on weights");
  cmd->add_option("--milestones", f.milestones,
                  "lr decay epochs, e.g. 15,22; 'none' disables; default 0.5E,0.75E");
  cmd->add_option("--gamma", f.gamma, "lr multiplier at each milestone");
  cmd->add_option("--loss", f.loss, "cross_entropy | mse");
  cmd->add_option("--hidden", f.hidden, "hidden layer widths, e.g. 32,16");
}

yoco::TrainConfig to_train_config(const TrainFlags& f, std::uint64_t seed) {
  yoco::TrainConfig cfg;
  cfg.epochs = f.epochs;
  cfg.batch_size = f.batch_size;
  cfg.lr = f.lr;
  cfg.momentum = f.momentum;
  cfg.weight_decay = f.weight_decay;
  cfg.lr_gamma = f.gamma;
  cfg.seed = seed;
  if (f.loss == "cross_entropy" || f.loss == "ce")
    cfg.loss_kind = yoco::LossKind::cross_entropy;
  else if (f.loss == "mse")
    cfg.loss_kind = yoco::LossKind::mse;
  else
    throw yoco::ConfigError("--loss must be cross_entropy or mse, not '" + f.loss + "'");
  if (f.milestones == "none") {
    cfg.lr_milestones = std::vector<int>{};
  } else if (!f.milestones.empty()) {
    std::vector<int> ms;
    for (const std::string& part : split(f.milestones, ','))
      ms.push_back(static_cast<int>(parse_long(part, "milestone")));
    cfg.lr_milestones = std::move(ms);
  }
  cfg.hidden_sizes.clear();
  for (const std::string& part : split(f.hidden, ','))
    cfg.hidden_sizes.push_back(static_cast<int>(parse_long(part, "hidden width")));
  return cfg;
}

void describe_train_flags(std::map<std::string, std::string>& kv, const TrainFlags& f) {
  kv["epochs"] = std::to_string(f.epochs);
  kv["batch-size"] = std::to_string(f.batch_size);
  kv["lr"] = fmt(f.lr, "%.17g");
  kv["momentum"] = fmt(f.momentum, "%.17g");
  kv["weight-decay"] = fmt(f.weight_decay, "%.17g");
  kv["milestones"] = f.milestones;
  kv["gamma"] = fmt(f.gamma, "%.17g");
  kv["loss"] = f.loss;
  kv["hidden"] = f.hidden;
}

std::string config_hash(const std::map<std::string, std::string>& kv) {
  std::string text;
  for (const auto& [key, value] : kv) text += key + "=" + value + "\n";
  return hex64(yoco::fnv1a64(text));
}

std::string swap_extension(const std::string& path, const std::string& ext) {
  const std::size_t slash = path.find_last_of('/');
  const std::size_t dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + ext;
  return path.substr(0, dot) + ext;
}

// Markdown summary goes next to the CSV, name tagged with the config hash.
std::string sibling_markdown(const std::string& out_csv, const std::string& hash) {
  const std::string stem = swap_extension(out_csv, "");
  return yoco::report_basename(stem, hash) + ".md";
}

struct MetricFlags {
  std::string metric = "lbpe";
  int early_epochs = 0;  // 0 = min(30, E)
  int topk = 5;
  bool raw_logits = false;
  int first_n = 0;  // 0 = min(10, E)
  int clusters = 1;
  std::string params_path;  // trained net for ssp features
};

void add_metric_flags(CLI::App* cmd, MetricFlags& f) {
  cmd->add_option("--metric", f.metric, "lbpe | el2n | forgetting | aum | entropy | ssp");
  cmd->add_option("--early-epochs", f.early_epochs,
                  "lbpe: restrict to the first E epochs (default 30)");
  cmd->add_option("--topk", f.topk,
                  "lbpe: average over the K best-accuracy epochs (default 5)");
  cmd->add_flag("--raw-logits", f.raw_logits, "lbpe ablation: skip the softmax");
  cmd->add_option("--first-n", f.first_n, "el2n: average over the first n epochs (default 10)");
  cmd->add_option("--clusters", f.clusters, "ssp: k-means clusters per class");
  cmd->add_option("--params", f.params_path, "ssp: YMP1 model file for feature extraction");
}

void describe_metric_flags(std::map<std::string, std::string>& kv, const MetricFlags& f) {
  kv["metric"] = f.metric;
  kv["early-epochs"] = std::to_string(f.early_epochs);
  kv["topk"] = std::to_string(f.topk);
  kv["raw-logits"] = f.raw_logits ? "1" : "0";
  kv["first-n"] = std::to_string(f.first_n);
  kv["clusters"] = std::to_string(f.clusters);
  kv["params"] = f.params_path;
}

yoco::ScoreVector compute_metric(const yoco::DynamicsLog& log, const MetricFlags& f,
                                 const DataFlags& data_flags, std::uint64_t seed) {
  const int e = static_cast<int>(log.num_epochs());
  if (f.metric == "lbpe") {
    const int early = f.early_epochs > 0 ? f.early_epochs : std::min(30, e);
    return yoco::lbpe_score(log, early, f.topk, f.raw_logits);
  }
  if (f.metric == "el2n") {
    const int first_n = f.first_n > 0 ? f.first_n : std::min(10, e);
    return yoco::el2n_score(log, first_n);
  }
  if (f.metric == "forgetting") return yoco::forgetting_score(log);
  if (f.metric == "aum") return yoco::aum_score(log);
  if (f.metric == "entropy") return yoco::entropy_score(log);
  if (f.metric == "ssp") {
    if (f.params_path.empty())
      throw yoco::ConfigError(
          "--metric ssp needs --params (a trained YMP1 model) plus the dataset flags; "
          "scores are distances in the model's last-hidden-layer feature space");
    yoco::ModelParams params = yoco::load_params(f.params_path);
    yoco::Dataset data = build_dataset(data_flags, seed);
    if (static_cast<long>(log.num_samples) != data.size())
      throw yoco::ConfigError("dataset has " + std::to_string(data.size()) +
                              " samples but the log covers " + std::to_string(log.num_samples));
    yoco::MatrixRXf features = yoco::extract_features(params, data);
    yoco::ScoreVector sv = yoco::ssp_distance_score(features, data.labels, f.clusters, seed);
    sv.source_log_hash = yoco::log_digest(log);
    return sv;
  }
  throw yoco::ConfigError("unknown metric '" + f.metric + "'");
}

// ---------------------------------------------------------------------------
// Subcommand payloads

struct TrainArgs {
  DataFlags data;
  TrainFlags train;
  std::uint64_t seed = 0;
  std::string out;
  std::string params_out;
};

int cmd_train(const TrainArgs& a) {
  std::map<std::string, std::string> kv;
  kv["cmd"] = "train";
  describe_data_flags(kv, a.data, "");
  describe_train_flags(kv, a.train);
  kv["seed"] = std::to_string(a.seed);
  const std::string params_out =
      a.params_out.empty() ? swap_extension(a.out, ".ymp") : a.params_out;
  // artifact destinations stay out of the hash: where a run writes does not
  // change what it computes
  const std::string hash = config_hash(kv);
  std::cout << "config_hash=" << hash << "\n";

  yoco::Dataset data = build_dataset(a.data, a.seed);
  yoco::TrainConfig cfg = to_train_config(a.train, a.seed);
  cfg.record_dynamics = true;

  yoco::TrainResult result = yoco::train_with_dynamics(data, cfg);
  result.log.config_hash = hash;
  yoco::write_log(result.log, a.out);
  yoco::save_params(result.params, params_out);

  std::cout << "samples=" << data.size() << " classes=" << data.num_classes
            << " epochs=" << cfg.epochs << "\n";
  std::cout << "final_train_accuracy=" << fmt(result.final_accuracy) << "\n";
  std::cout << "log=" << a.out << "\n";
  std::cout << "params=" << params_out << "\n";
  return 0;
}

struct ScoreArgs {
  std::string log_path;
  MetricFlags metric;
  DataFlags data;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_score(const ScoreArgs& a) {
  std::map<std::string, std::string> kv;
  kv["cmd"] = "score";
  kv["log"] = a.log_path;
  describe_metric_flags(kv, a.metric);
  describe_data_flags(kv, a.data, "");
  kv["seed"] = std::to_string(a.seed);
  const std::string hash = config_hash(kv);
  std::cout << "config_hash=" << hash << "\n";

  yoco::DynamicsLog log = yoco::read_log(a.log_path);
  yoco::ScoreVector sv = compute_metric(log, a.metric, a.data, a.seed);

  std::string comment = "config_hash=" + hash + " metric=" + sv.metric +
                        " log_hash=" + hex64(sv.source_log_hash);
  for (const std::string& w : sv.warnings) comment += "; warning: " + w;
  yoco::write_scores_csv(sv, a.out, comment);

  for (const std::string& w : sv.warnings) std::cout << "warning: " << w << "\n";
  std::cout << "metric=" << sv.metric << " rows=" << sv.size() << "\n";
  std::cout << "scores=" << a.out << "\n";
  return 0;
}

struct SelectArgs {
  std::string scores_path;
  std::string labels_from;
  long per_class = 0;
  long count = 0;
  bool balanced = false, rank = false, ccs = false, random = false;
  std::string prefer = "easy";
  bool clamp = false;
  double hard_cutoff = 0.3;
  int strata = 50;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_select(const SelectArgs& a) {
  std::map<std::string, std::string> kv;
  kv["cmd"] = "select";
  kv["scores"] = a.scores_path;
  kv["labels-from"] = a.labels_from;
  kv["per-class"] = std::to_string(a.per_class);
  kv["count"] = std::to_string(a.count);
  kv["balanced"] = a.balanced ? "1" : "0";
  kv["rank"] = a.rank ? "1" : "0";
  kv["ccs"] = a.ccs ? "1" : "0";
  kv["random"] = a.random ? "1" : "0";
  kv["prefer"] = a.prefer;
  kv["clamp"] = a.clamp ? "1" : "0";
  kv["hard-cutoff"] = fmt(a.hard_cutoff, "%.17g");
  kv["strata"] = std::to_string(a.strata);
  kv["seed"] = std::to_string(a.seed);
  const std::string hash = config_hash(kv);
  std::cout << "config_hash=" << hash << "\n";

  const int chosen = int(a.balanced) + int(a.rank) + int(a.ccs) + int(a.random);
  if (chosen != 1)
    throw yoco::ConfigError("pick exactly one of --balanced, --rank, --ccs, --random");
  if ((a.per_class > 0) == (a.count > 0))
    throw yoco::ConfigError("pick exactly one budget: --per-class or --count");
  yoco::Prefer prefer;
  if (a.prefer == "easy")
    prefer = yoco::Prefer::easy;
  else if (a.prefer == "hard")
    prefer = yoco::Prefer::hard;
  else
    throw yoco::ConfigError("--prefer must be easy or hard, not '" + a.prefer + "'");

  yoco::DynamicsLog log = yoco::read_log(a.labels_from);
  const int num_classes = static_cast<int>(log.num_classes);
  Eigen::VectorXi labels(log.num_samples);
  for (std::size_t i = 0; i < log.labels.size(); ++i)
    labels[static_cast<long>(i)] = static_cast<int>(log.labels[i]);

  yoco::SubsetIndex subset;
  if (a.random) {
    const long total = a.count > 0 ? a.count : a.per_class * num_classes;
    subset = yoco::random_select(labels.size(), total, a.seed);
    yoco::attach_class_counts(subset, labels, num_classes);
  } else {
    yoco::ScoreVector scores = yoco::read_scores_csv(a.scores_path);
    if (scores.size() != labels.size())
      throw yoco::ConfigError("scores cover " + std::to_string(scores.size()) +
                              " samples but the log has " + std::to_string(labels.size()));
    if (a.balanced) {
      long per_class = a.per_class;
      if (per_class == 0) {
        if (a.count % num_classes != 0)
          throw yoco::ConfigError("--count " + std::to_string(a.count) +
                                  " does not divide evenly over " +
                                  std::to_string(num_classes) + " classes; use --per-class");
        per_class = a.count / num_classes;
      }
      subset = yoco::balanced_select(scores, labels, num_classes, per_class, a.clamp, prefer);
    } else {
      const long total = a.count > 0 ? a.count : a.per_class * num_classes;
      if (a.rank)
        subset = yoco::rank_select(scores, labels, num_classes, total, prefer);
      else
        subset = yoco::ccs_select(scores, labels, num_classes, total, a.hard_cutoff, a.strata,
                                  a.seed);
    }
  }

  yoco::write_subset(subset, a.out);
  std::cout << "method=" << subset.method << " selected=" << subset.size() << "\n";
  std::cout << "per_class_counts=[";
  for (long k = 0; k < subset.per_class_counts.size(); ++k)
    std::cout << (k ? "," : "") << subset.per_class_counts[k];
  std::cout << "]\n";
  if (subset.parameters.count("clamped_classes"))
    std::cout << "warning: clamped classes " << subset.parameters.at("clamped_classes") << "\n";
  std::cout << "subset=" << a.out << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string subset_path;
  DataFlags data;
  DataFlags test_data;
  TrainFlags train;
  std::uint64_t seed = 0;
  std::uint64_t test_seed = kUnsetSeed;
  std::string seeds = "0,1,2";
  std::string out;
};

// The test set comes from its own source so subset indices keep referring to
// the scored training set: blobs use --test-seed (default seed+1), file
// sources use the --test-* flags.
yoco::Dataset build_test_set(const DataFlags& train_flags, const DataFlags& test_flags,
                             std::uint64_t test_seed) {
  const bool has_file = !test_flags.csv.empty() || !test_flags.ytf.empty();
  if (has_file) {
    DataFlags f = test_flags;
    if (f.label_column == "label") f.label_column = train_flags.label_column;
    return build_dataset(f, test_seed);
  }
  if (train_flags.blobs.empty())
    throw yoco::ConfigError("file-based training data needs --test-csv or --test-ytf");
  DataFlags f = train_flags;  // same blob spec, fresh draw
  return build_dataset(f, test_seed);
}

int cmd_evaluate(const EvaluateArgs& a) {
  std::map<std::string, std::string> kv;
  kv["cmd"] = "evaluate";
  kv["subset"] = a.subset_path;
  describe_data_flags(kv, a.data, "");
  describe_data_flags(kv, a.test_data, "test-");
  describe_train_flags(kv, a.train);
  kv["seed"] = std::to_string(a.seed);
  kv["test-seed"] = a.test_seed == kUnsetSeed ? "auto" : std::to_string(a.test_seed);
  kv["seeds"] = a.seeds;
  const std::string hash = config_hash(kv);
  std::cout << "config_hash=" << hash << "\n";

  yoco::Dataset train = build_dataset(a.data, a.seed);
  const std::uint64_t test_seed = a.test_seed == kUnsetSeed ? a.seed + 1 : a.test_seed;
  yoco::Dataset test = build_test_set(a.data, a.test_data, test_seed);
  yoco::SubsetIndex subset = yoco::read_subset(a.subset_path);
  yoco::TrainConfig cfg = to_train_config(a.train, a.seed);
  std::vector<std::uint64_t> seeds = parse_seed_list(a.seeds);

  yoco::AccuracyStats stats = yoco::evaluate_subset(train, subset, test, cfg, seeds);
  yoco::write_eval_report_csv(stats, subset, a.out, hash);
  const std::string md_path = sibling_markdown(a.out, hash);
  {
    std::ofstream md(md_path);
    if (!md) throw yoco::IoError("cannot open '" + md_path + "' for writing");
    md << yoco::render_eval_markdown(stats, subset, hash);
  }

  for (const std::string& w : stats.warnings) std::cout << "warning: " << w << "\n";
  std::cout << "n_train_used=" << stats.n_train_used << " seeds=" << seeds.size() << "\n";
  std::cout << "mean_test_accuracy=" << fmt(stats.mean) << " std=" << fmt(stats.stddev) << "\n";
  std::cout << "report=" << a.out << "\n";
  std::cout << "summary=" << md_path << "\n";
  return 0;
}

struct SweepArgs {
  std::string log_path;
  MetricFlags metric;
  DataFlags data;
  TrainFlags train;
  std::string ratios = "0.1:0.9:0.1";
  std::uint64_t seed = 0;
  std::uint64_t test_seed = kUnsetSeed;
  std::string seeds = "0,1,2";
  std::string out;
};

int cmd_sweep(const SweepArgs& a) {
  std::map<std::string, std::string> kv;
  kv["cmd"] = "sweep";
  kv["log"] = a.log_path;
  describe_metric_flags(kv, a.metric);
  describe_data_flags(kv, a.data, "");
  describe_train_flags(kv, a.train);
  kv["ratios"] = a.ratios;
  kv["seed"] = std::to_string(a.seed);
  kv["test-seed"] = a.test_seed == kUnsetSeed ? "auto" : std::to_string(a.test_seed);
  kv["seeds"] = a.seeds;
  const std::string hash = config_hash(kv);
  std::cout << "config_hash=" << hash << "\n";

  yoco::DynamicsLog log = yoco::read_log(a.log_path);
  yoco::Dataset train = build_dataset(a.data, a.seed);
  if (static_cast<long>(log.num_samples) != train.size())
    throw yoco::ConfigError("dataset has " + std::to_string(train.size()) +
                            " samples but the log covers " + std::to_string(log.num_samples));
  const std::uint64_t test_seed = a.test_seed == kUnsetSeed ? a.seed + 1 : a.test_seed;
  yoco::Dataset test = build_test_set(a.data, DataFlags{}, test_seed);

  yoco::ScoreVector scores = compute_metric(log, a.metric, a.data, a.seed);
  yoco::TrainConfig cfg = to_train_config(a.train, a.seed);
  std::vector<std::uint64_t> seeds = parse_seed_list(a.seeds);
  std::vector<double> ratios = parse_ratios(a.ratios);

  std::vector<yoco::SweepRow> rows = yoco::ratio_sweep(train, test, scores, ratios, cfg, seeds);
  yoco::TurningPointReport turning = yoco::find_turning_point(rows);
  yoco::write_sweep_csv(rows, turning, a.out, hash);
  const std::string md_path = sibling_markdown(a.out, hash);
  {
    std::ofstream md(md_path);
    if (!md) throw yoco::IoError("cannot open '" + md_path + "' for writing");
    md << yoco::render_sweep_markdown(rows, turning, hash);
  }

  for (const yoco::SweepRow& row : rows)
    std::cout << "ratio=" << fmt(row.ratio, "%.2f") << " easy=" << fmt(row.easy_acc.mean)
              << " hard=" << fmt(row.hard_acc.mean) << " diff=" << fmt(row.diff_mean, "%+.6f")
              << "\n";
  if (turning.crossover_ratio)
    std::cout << "crossover_ratio=" << fmt(*turning.crossover_ratio, "%.4f") << "\n";
  else
    std::cout << "crossover_ratio=none\n";
  std::cout << "sign_changes=" << turning.sign_changes << "\n";
  std::cout << "report=" << a.out << "\n";
  std::cout << "summary=" << md_path << "\n";
  return 0;
}

void print_defaults() {
  std::cout << "# defaults; any line works in a --config file for the matching subcommand\n";
  std::cout << "# train / evaluate / sweep\n";
  TrainFlags t;
  std::cout << "epochs = " << t.epochs << "\n";
  std::cout << "batch-size = " << t.batch_size << "\n";
  std::cout << "lr = " << fmt(t.lr, "%g") << "\n";
  std::cout << "momentum = " << fmt(t.momentum, "%g") << "\n";
  std::cout << "weight-decay = " << fmt(t.weight_decay, "%g") << "\n";
  std::cout << "# milestones default to 0.5E and 0.75E; 'none' disables\n";
  std::cout << "gamma = " << fmt(t.gamma, "%g") << "\n";
  std::cout << "loss = " << t.loss << "\n";
  std::cout << "hidden = " << t.hidden << "\n";
  std::cout << "seed = 0\n";
  std::cout << "# score\n";
  MetricFlags m;
  std::cout << "metric = " << m.metric << "\n";
  std::cout << "topk = " << m.topk << "\n";
  std::cout << "# early-epochs and first-n default to min(30, E) and min(10, E)\n";
  std::cout << "clusters = " << m.clusters << "\n";
  std::cout << "# select\n";
  SelectArgs s;
  std::cout << "prefer = " << s.prefer << "\n";
  std::cout << "hard-cutoff = " << fmt(s.hard_cutoff, "%g") << "\n";
  std::cout << "strata = " << s.strata << "\n";
  std::cout << "# evaluate / sweep\n";
  EvaluateArgs e;
  std::cout << "seeds = " << e.seeds << "\n";
  SweepArgs w;
  std::cout << "ratios = " << w.ratios << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dataset pruning toolkit: train, score, select, evaluate, sweep"};
  app.require_subcommand(1);

  std::uint64_t env_seed = 0;
  bool have_env_seed = false;
  std::string env_error;
  if (const char* env = std::getenv("YOCO_SEED")) {
    try {
      env_seed = parse_seed_value(env, "YOCO_SEED");
      have_env_seed = true;
    } catch (const yoco::ConfigError& e) {
      env_error = e.what();
    }
  }
  const std::uint64_t default_seed = have_env_seed ? env_seed : 0;

  auto add_seed = [&](CLI::App* cmd, std::uint64_t& slot) {
    slot = default_seed;
    cmd->add_option("--seed", slot, "base seed (YOCO_SEED env is the fallback)");
  };
  std::map<CLI::App*, std::string> config_paths;
  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_paths[cmd],
                    "key = value config file (# comments; explicit flags win)");
  };
  // required paths are checked after config application, not at parse time,
  // so a config file can supply them too
  struct RequiredOpt {
    CLI::App* cmd;
    const char* flag;
    const std::string* slot;
  };
  std::vector<RequiredOpt> required_opts;
  auto require = [&](CLI::App* cmd, const char* flag, const std::string& slot) {
    required_opts.push_back({cmd, flag, &slot});
  };

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "train an MLP and record its dynamics");
  add_config(train);
  add_data_flags(train, train_args.data, "training data");
  add_train_flags(train, train_args.train);
  add_seed(train, train_args.seed);
  train->add_option("--out", train_args.out, "YDLG dynamics log to write (required)");
  require(train, "--out", train_args.out);
  train->add_option("--params-out", train_args.params_out,
                    "YMP1 model file (default: --out with .ymp)");

  ScoreArgs score_args;
  CLI::App* score = app.add_subcommand("score", "compute per-sample scores from a dynamics log");
  add_config(score);
  score->add_option("--log", score_args.log_path, "YDLG dynamics log (required)");
  require(score, "--log", score_args.log_path);
  add_metric_flags(score, score_args.metric);
  add_data_flags(score, score_args.data, "dataset (ssp only)");
  add_seed(score, score_args.seed);
  score->add_option("--out", score_args.out, "scores CSV to write (required)");
  require(score, "--out", score_args.out);

  SelectArgs select_args;
  CLI::App* select = app.add_subcommand("select", "turn scores into a subset");
  add_config(select);
  select->add_option("--scores", select_args.scores_path, "scores CSV (not needed for --random)");
  select->add_option("--labels-from", select_args.labels_from,
                     "YDLG log supplying labels (required)");
  require(select, "--labels-from", select_args.labels_from);
  select->add_option("--per-class", select_args.per_class, "images per class budget");
  select->add_option("--count", select_args.count, "total budget");
  select->add_flag("--balanced", select_args.balanced, "equal per-class counts");
  select->add_flag("--rank", select_args.rank, "global score ranking");
  select->add_flag("--ccs", select_args.ccs, "coverage-centric stratified sampling");
  select->add_flag("--random", select_args.random, "uniform random baseline");
  select->add_option("--prefer", select_args.prefer, "easy | hard");
  select->add_flag("--clamp", select_args.clamp, "balanced: take all of a deficient class");
  select->add_option("--hard-cutoff", select_args.hard_cutoff, "ccs: drop this hardest fraction");
  select->add_option("--strata", select_args.strata, "ccs: number of score bins");
  add_seed(select, select_args.seed);
  select->add_option("--out", select_args.out,
                     "subset CSV to write, JSON sidecar alongside (required)");
  require(select, "--out", select_args.out);

  EvaluateArgs eval_args;
  CLI::App* evaluate = app.add_subcommand("evaluate", "retrain on a subset and report accuracy");
  add_config(evaluate);
  evaluate->add_option("--subset", eval_args.subset_path, "subset CSV (required)");
  require(evaluate, "--subset", eval_args.subset_path);
  add_data_flags(evaluate, eval_args.data, "training data");
  evaluate->add_option("--test-csv", eval_args.test_data.csv, "test set CSV");
  evaluate->add_option("--test-ytf", eval_args.test_data.ytf, "test set YTF1 tensor");
  evaluate->add_option("--test-ytl", eval_args.test_data.ytl, "test set YTL1 labels");
  evaluate->add_option("--test-seed", eval_args.test_seed,
                       "blob test draw seed (default: --seed + 1)");
  add_train_flags(evaluate, eval_args.train);
  add_seed(evaluate, eval_args.seed);
  evaluate->add_option("--seeds", eval_args.seeds, "comma list of retraining seeds");
  evaluate->add_option("--out", eval_args.out, "report CSV to write (required)");
  require(evaluate, "--out", eval_args.out);

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "easy-vs-hard accuracy across pruning ratios");
  add_config(sweep);
  sweep->add_option("--log", sweep_args.log_path, "YDLG dynamics log (required)");
  require(sweep, "--log", sweep_args.log_path);
  add_metric_flags(sweep, sweep_args.metric);
  add_data_flags(sweep, sweep_args.data, "training data");
  sweep->add_option("--ratios", sweep_args.ratios, "start:end:step range or comma list");
  add_train_flags(sweep, sweep_args.train);
  add_seed(sweep, sweep_args.seed);
  sweep->add_option("--test-seed", sweep_args.test_seed,
                    "blob test draw seed (default: --seed + 1)");
  sweep->add_option("--seeds", sweep_args.seeds, "comma list of retraining seeds");
  sweep->add_option("--out", sweep_args.out, "sweep CSV to write (required)");
  require(sweep, "--out", sweep_args.out);

  CLI::App* defaults = app.add_subcommand("defaults", "print every tunable default as key = value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (!env_error.empty()) throw yoco::ConfigError(env_error);
    for (const auto& [cmd, path] : config_paths)
      if (cmd->parsed() && !path.empty()) apply_config_file(cmd, path);
    for (const auto& r : required_opts)
      if (r.cmd->parsed() && r.slot->empty())
        throw yoco::ConfigError(std::string(r.flag) + " is required");
    if (train->parsed()) return cmd_train(train_args);
    if (score->parsed()) return cmd_score(score_args);
    if (select->parsed()) return cmd_select(select_args);
    if (evaluate->parsed()) return cmd_evaluate(eval_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    if (defaults->parsed()) {
      print_defaults();
      return 0;
    }
  } catch (const yoco::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const yoco::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const yoco::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const yoco::InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
