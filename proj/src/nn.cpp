#include "yoco/nn.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <vector>

namespace yoco {

namespace {

template <class Scalar>
MatrixRX<Scalar> softmax_rows(const MatrixRX<Scalar>& logits) {
  MatrixRX<Scalar> p(logits.rows(), logits.cols());
  for (long i = 0; i < logits.rows(); ++i) {
    Scalar m = logits.row(i).maxCoeff();
    p.row(i) = (logits.row(i).array() - m).exp();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

// First index attaining the row maximum; ties go to the lower class id.
template <class Scalar>
long argmax_row(const MatrixRX<Scalar>& m, long row) {
  long best = 0;
  for (long c = 1; c < m.cols(); ++c)
    if (m(row, c) > m(row, best)) best = c;
  return best;
}

template <class Scalar>
void check_batch(const Mlp<Scalar>& params, const MatrixRX<Scalar>& batch,
                 const Eigen::VectorXi* labels) {
  if (params.weights.empty()) throw ConfigError("network has no layers");
  if (batch.cols() != params.input_dim())
    throw ConfigError("batch width " + std::to_string(batch.cols()) +
                      " does not match network input " + std::to_string(params.input_dim()));
  if (labels) {
    if (labels->size() != batch.rows())
      throw ConfigError("batch has " + std::to_string(batch.rows()) + " rows but " +
                        std::to_string(labels->size()) + " labels");
    for (long i = 0; i < labels->size(); ++i)
      if ((*labels)[i] < 0 || (*labels)[i] >= params.output_dim())
        throw ConfigError("label " + std::to_string((*labels)[i]) + " at row " +
                          std::to_string(i) + " is outside [0, " +
                          std::to_string(params.output_dim()) + ")");
  }
}

// Loss of given logits (no decay term), mean over the batch.
template <class Scalar>
Scalar data_loss_from_logits(const MatrixRX<Scalar>& logits, const Eigen::VectorXi& labels,
                             LossKind loss_kind) {
  const long b = logits.rows();
  const long c = logits.cols();
  if (loss_kind == LossKind::mse) {
    MatrixRX<Scalar> e = softmax_rows(logits);
    for (long i = 0; i < b; ++i) e(i, labels[i]) -= Scalar(1);
    return Scalar(0.5) * e.squaredNorm() / static_cast<Scalar>(b * c);
  }
  Scalar total = Scalar(0);
  for (long i = 0; i < b; ++i) {
    Scalar m = logits.row(i).maxCoeff();
    Scalar lse = m + std::log((logits.row(i).array() - m).exp().sum());
    total += lse - logits(i, labels[i]);
  }
  return total / static_cast<Scalar>(b);
}

template <class Scalar>
Scalar decay_term(const Mlp<Scalar>& params, double weight_decay) {
  if (weight_decay == 0.0) return Scalar(0);
  Scalar sum = Scalar(0);
  for (const auto& w : params.weights) sum += w.squaredNorm();
  return Scalar(0.5) * static_cast<Scalar>(weight_decay) * sum;
}

template <class Scalar>
long flat_param_count(const Mlp<Scalar>& params) {
  long total = 0;
  for (const auto& w : params.weights) total += w.size();
  for (const auto& b : params.biases) total += b.size();
  return total;
}

VectorX<double> flatten(const Mlp<double>& grads) {
  VectorX<double> flat(flat_param_count(grads));
  long at = 0;
  for (const auto& w : grads.weights) {
    for (long r = 0; r < w.rows(); ++r)
      for (long c = 0; c < w.cols(); ++c) flat[at++] = w(r, c);
  }
  for (const auto& b : grads.biases)
    for (long r = 0; r < b.size(); ++r) flat[at++] = b[r];
  return flat;
}

}  // namespace

void validate_config(const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (cfg.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(cfg.lr > 0)) throw ConfigError("lr must be > 0");
  if (cfg.momentum < 0 || cfg.momentum >= 1) throw ConfigError("momentum must lie in [0, 1)");
  if (cfg.weight_decay < 0) throw ConfigError("weight_decay must be >= 0");
  if (!(cfg.lr_gamma > 0)) throw ConfigError("lr_gamma must be > 0");
  if (cfg.lr_milestones) {
    int prev = -1;
    for (int m : *cfg.lr_milestones) {
      if (m < 0 || m >= cfg.epochs)
        throw ConfigError("lr milestone " + std::to_string(m) + " is outside [0, " +
                          std::to_string(cfg.epochs) + ")");
      if (m <= prev) throw ConfigError("lr milestones must be strictly increasing");
      prev = m;
    }
  }
  for (int h : cfg.hidden_sizes)
    if (h < 1) throw ConfigError("hidden layer sizes must be >= 1");
}

std::vector<int> resolved_milestones(const TrainConfig& cfg) {
  if (cfg.lr_milestones) return *cfg.lr_milestones;
  // Conventional multi-step schedule at 50% and 75% of the run; milestones
  // that would land on epoch 0 (tiny runs) are dropped.
  std::vector<int> out;
  for (int m : {cfg.epochs / 2, cfg.epochs * 3 / 4})
    if (m >= 1 && (out.empty() || m > out.back())) out.push_back(m);
  return out;
}

double lr_at_epoch(const TrainConfig& cfg, int epoch) {
  double lr = cfg.lr;
  for (int m : resolved_milestones(cfg))
    if (m <= epoch) lr *= cfg.lr_gamma;
  return lr;
}

template <class Scalar>
Mlp<Scalar> init_mlp(const std::vector<int>& layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() < 2) throw ConfigError("init_mlp needs at least 2 layer sizes");
  for (int s : layer_sizes)
    if (s < 1) throw ConfigError("layer sizes must be >= 1");

  Mlp<Scalar> params;
  params.layer_sizes = layer_sizes;
  std::mt19937_64 rng(mix_seed(seed, 0));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    const double std_dev = std::sqrt(2.0 / fan_in);
    MatrixRX<Scalar> w(fan_out, fan_in);
    for (long r = 0; r < w.rows(); ++r)
      for (long c = 0; c < w.cols(); ++c)
        w(r, c) = static_cast<Scalar>(std_dev * normal(rng));
    params.weights.push_back(std::move(w));
    params.biases.push_back(VectorX<Scalar>::Zero(fan_out));
  }
  return params;
}

template <class Scalar>
MatrixRX<Scalar> forward(const Mlp<Scalar>& params, const MatrixRX<Scalar>& batch) {
  check_batch(params, batch, nullptr);
  MatrixRX<Scalar> z = batch;
  const long layers = params.num_layers();
  for (long l = 0; l < layers; ++l) {
    z = ((z * params.weights[l].transpose()).rowwise() + params.biases[l].transpose()).eval();
    if (l + 1 < layers) z = z.cwiseMax(Scalar(0));
  }
  return z;
}

template <class Scalar>
LossGrad<Scalar> loss_and_grad(const Mlp<Scalar>& params, const MatrixRX<Scalar>& batch,
                               const Eigen::VectorXi& labels, LossKind loss_kind,
                               double weight_decay) {
  check_batch(params, batch, &labels);
  const long layers = params.num_layers();
  const long b = batch.rows();
  const long c = params.output_dim();

  std::vector<MatrixRX<Scalar>> acts(layers + 1);
  std::vector<MatrixRX<Scalar>> pre(layers);
  acts[0] = batch;
  for (long l = 0; l < layers; ++l) {
    pre[l] = (acts[l] * params.weights[l].transpose()).rowwise() + params.biases[l].transpose();
    acts[l + 1] = (l + 1 < layers) ? pre[l].cwiseMax(Scalar(0)).eval() : pre[l];
  }
  const MatrixRX<Scalar>& logits = acts[layers];
  MatrixRX<Scalar> p = softmax_rows(logits);

  LossGrad<Scalar> out;
  MatrixRX<Scalar> dz(b, c);
  if (loss_kind == LossKind::mse) {
    MatrixRX<Scalar> e = p;
    for (long i = 0; i < b; ++i) e(i, labels[i]) -= Scalar(1);
    out.loss = Scalar(0.5) * e.squaredNorm() / static_cast<Scalar>(b * c);
    // Chain through the softmax: dz = p .* (dL/dp - <dL/dp, p>)
    MatrixRX<Scalar> g = e / static_cast<Scalar>(b * c);
    for (long i = 0; i < b; ++i) {
      Scalar dot = g.row(i).dot(p.row(i));
      dz.row(i) = (p.row(i).array() * (g.row(i).array() - dot)).matrix();
    }
  } else {
    out.loss = data_loss_from_logits(logits, labels, loss_kind);
    dz = p;
    for (long i = 0; i < b; ++i) dz(i, labels[i]) -= Scalar(1);
    dz /= static_cast<Scalar>(b);
  }

  out.grads = params.zeros_like();
  MatrixRX<Scalar> delta = dz;
  for (long l = layers - 1; l >= 0; --l) {
    out.grads.weights[l] = delta.transpose() * acts[l];
    out.grads.biases[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      MatrixRX<Scalar> da = delta * params.weights[l];
      delta = da.cwiseProduct(pre[l - 1].unaryExpr(
          [](Scalar v) { return v > Scalar(0) ? Scalar(1) : Scalar(0); }));
    }
  }

  if (weight_decay != 0.0) {
    out.loss += decay_term(params, weight_decay);
    for (long l = 0; l < layers; ++l)
      out.grads.weights[l] += static_cast<Scalar>(weight_decay) * params.weights[l];
  }
  return out;
}

template <class Scalar>
Scalar compute_loss(const Mlp<Scalar>& params, const MatrixRX<Scalar>& batch,
                    const Eigen::VectorXi& labels, LossKind loss_kind, double weight_decay) {
  check_batch(params, batch, &labels);
  MatrixRX<Scalar> logits = forward(params, batch);
  return data_loss_from_logits(logits, labels, loss_kind) + decay_term(params, weight_decay);
}

template <class Scalar>
void sgd_step(Mlp<Scalar>& params, const Mlp<Scalar>& grads, Mlp<Scalar>& velocity,
              double lr, double momentum) {
  const Scalar m = static_cast<Scalar>(momentum);
  const Scalar step = static_cast<Scalar>(lr);
  for (long l = 0; l < params.num_layers(); ++l) {
    velocity.weights[l] = m * velocity.weights[l] + grads.weights[l];
    velocity.biases[l] = m * velocity.biases[l] + grads.biases[l];
    params.weights[l] -= step * velocity.weights[l];
    params.biases[l] -= step * velocity.biases[l];
  }
}

TrainResult train_with_dynamics(const Dataset& train, const TrainConfig& cfg) {
  validate_config(cfg);
  validate_dataset(train);

  std::vector<int> sizes;
  sizes.push_back(static_cast<int>(train.dim()));
  for (int h : cfg.hidden_sizes) sizes.push_back(h);
  sizes.push_back(train.num_classes);

  TrainResult result;
  result.params = init_mlp<float>(sizes, cfg.seed);
  Mlp<float> velocity = result.params.zeros_like();

  const long n = train.size();
  const MatrixRXf& x = train.features;
  std::mt19937_64 shuffle_rng(mix_seed(cfg.seed, 1));
  std::vector<long> order(n);

  result.log.num_samples = static_cast<std::uint32_t>(n);
  result.log.num_classes = static_cast<std::uint32_t>(train.num_classes);
  result.log.labels.resize(n);
  for (long i = 0; i < n; ++i) result.log.labels[i] = static_cast<std::uint32_t>(train.labels[i]);
  result.log.loss_kind = cfg.loss_kind;
  result.log.seed = cfg.seed;
  if (cfg.record_dynamics) result.log.epochs.reserve(cfg.epochs);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = lr_at_epoch(cfg, epoch);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    for (long start = 0; start < n; start += cfg.batch_size) {
      const long rows = std::min<long>(cfg.batch_size, n - start);
      MatrixRXf xb(rows, x.cols());
      Eigen::VectorXi yb(rows);
      for (long r = 0; r < rows; ++r) {
        xb.row(r) = x.row(order[start + r]);
        yb[r] = train.labels[order[start + r]];
      }
      auto lg = loss_and_grad(result.params, xb, yb, cfg.loss_kind, cfg.weight_decay);
      if (!std::isfinite(static_cast<double>(lg.loss)))
        throw NumericError("training diverged at epoch " + std::to_string(epoch));
      sgd_step(result.params, lg.grads, velocity, lr, cfg.momentum);
    }

    // Epoch-end snapshot over the unshuffled training set.
    MatrixRXf logits = forward(result.params, x);
    long correct = 0;
    for (long i = 0; i < n; ++i)
      if (argmax_row(logits, i) == train.labels[i]) ++correct;
    const float accuracy = static_cast<float>(correct) / static_cast<float>(n);
    const float mean_loss = data_loss_from_logits(logits, train.labels, cfg.loss_kind) +
                            decay_term(result.params, cfg.weight_decay);
    if (!std::isfinite(mean_loss))
      throw NumericError("training diverged at epoch " + std::to_string(epoch));

    if (cfg.record_dynamics)
      result.log.epochs.push_back(EpochRecord{accuracy, mean_loss, std::move(logits)});
    result.final_accuracy = accuracy;
  }
  return result;
}

template <class Scalar>
GradCheckReport finite_diff_check(const Mlp<Scalar>& params, const MatrixRX<Scalar>& batch,
                                  const Eigen::VectorXi& labels, LossKind loss_kind,
                                  double step, double weight_decay) {
  if (!(step > 0)) throw ConfigError("finite_diff_check needs step > 0");
  auto analytic = loss_and_grad(params, batch, labels, loss_kind, weight_decay).grads;

  GradCheckReport report;
  report.step_size = step;
  Mlp<Scalar> probe = params;
  const Scalar h = static_cast<Scalar>(step);

  auto compare = [&](Scalar& slot, Scalar a, int layer, long row, long col) {
    const Scalar saved = slot;
    slot = saved + h;
    const double up = static_cast<double>(compute_loss(probe, batch, labels, loss_kind, weight_decay));
    slot = saved - h;
    const double down = static_cast<double>(compute_loss(probe, batch, labels, loss_kind, weight_decay));
    slot = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double rel = std::abs(static_cast<double>(a) - numeric) /
                       std::max({std::abs(static_cast<double>(a)), std::abs(numeric), 1e-8});
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_layer = layer;
      report.worst_row = row;
      report.worst_col = col;
    }
  };

  for (long l = 0; l < probe.num_layers(); ++l) {
    auto& w = probe.weights[l];
    for (long r = 0; r < w.rows(); ++r)
      for (long c = 0; c < w.cols(); ++c)
        compare(w(r, c), analytic.weights[l](r, c), static_cast<int>(l), r, c);
    auto& b = probe.biases[l];
    for (long r = 0; r < b.size(); ++r)
      compare(b[r], analytic.biases[l][r], static_cast<int>(l), r, -1);
  }
  return report;
}

template <class Scalar>
MatrixRX<Scalar> extract_features(const Mlp<Scalar>& params, const MatrixRX<Scalar>& inputs) {
  if (params.num_layers() < 2) throw ConfigError("network has no hidden layer to read features from");
  check_batch(params, inputs, nullptr);
  MatrixRX<Scalar> z = inputs;
  for (long l = 0; l + 1 < params.num_layers(); ++l) {
    z = ((z * params.weights[l].transpose()).rowwise() + params.biases[l].transpose()).eval();
    z = z.cwiseMax(Scalar(0));
  }
  return z;
}

MatrixRXf extract_features(const ModelParams& params, const Dataset& data) {
  return extract_features(params, data.features);
}

namespace {

void put_u32(std::vector<unsigned char>& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::vector<unsigned char>& buf, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(buf, bits);
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float get_f32(const unsigned char* p) {
  std::uint32_t bits = get_u32(p);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

}  // namespace

void save_params(const ModelParams& params, const std::string& path) {
  if (params.weights.empty()) throw ConfigError("refusing to save an empty network");
  std::vector<unsigned char> buf;
  buf.insert(buf.end(), {'Y', 'M', 'P', '1'});
  buf.push_back(1);
  buf.push_back(0);  // u16 version, little-endian
  put_u32(buf, static_cast<std::uint32_t>(params.layer_sizes.size()));
  for (int s : params.layer_sizes) put_u32(buf, static_cast<std::uint32_t>(s));
  for (long l = 0; l < params.num_layers(); ++l) {
    const auto& w = params.weights[l];
    for (long r = 0; r < w.rows(); ++r)
      for (long c = 0; c < w.cols(); ++c) put_f32(buf, w(r, c));
    const auto& b = params.biases[l];
    for (long r = 0; r < b.size(); ++r) put_f32(buf, b[r]);
  }
  std::uint32_t crc = static_cast<std::uint32_t>(
      ::crc32(::crc32(0L, Z_NULL, 0), buf.data(), static_cast<uInt>(buf.size())));
  put_u32(buf, crc);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

ModelParams load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() < 14 || std::memcmp(buf.data(), "YMP1", 4) != 0)
    throw IoError("'" + path + "' is not a YMP1 parameter file");
  const std::uint16_t version = static_cast<std::uint16_t>(buf[4] | (buf[5] << 8));
  if (version != 1)
    throw IoError("'" + path + "' has version " + std::to_string(version) + ", expected 1");

  const std::uint32_t num_sizes = get_u32(buf.data() + 6);
  if (num_sizes < 2 || num_sizes > 64)
    throw IoError("'" + path + "' declares " + std::to_string(num_sizes) + " layer sizes");
  std::size_t want = 10 + 4ULL * num_sizes;
  if (buf.size() < want + 4) throw IoError("'" + path + "' is truncated");

  std::vector<int> sizes(num_sizes);
  for (std::uint32_t i = 0; i < num_sizes; ++i) {
    sizes[i] = static_cast<int>(get_u32(buf.data() + 10 + 4 * i));
    if (sizes[i] < 1) throw IoError("'" + path + "' has a non-positive layer size");
  }
  for (std::uint32_t l = 0; l + 1 < num_sizes; ++l)
    want += 4ULL * sizes[l] * sizes[l + 1] + 4ULL * sizes[l + 1];
  want += 4;  // CRC
  if (buf.size() != want)
    throw IoError("'" + path + "' is " + std::to_string(buf.size()) + " bytes, expected " +
                  std::to_string(want));

  const std::uint32_t stored = get_u32(buf.data() + buf.size() - 4);
  const std::uint32_t actual = static_cast<std::uint32_t>(
      ::crc32(::crc32(0L, Z_NULL, 0), buf.data(), static_cast<uInt>(buf.size() - 4)));
  if (stored != actual)
    throw IoError("'" + path + "' failed its CRC32 integrity check (file corrupt)");

  ModelParams params;
  params.layer_sizes = sizes;
  std::size_t at = 10 + 4ULL * num_sizes;
  for (std::uint32_t l = 0; l + 1 < num_sizes; ++l) {
    MatrixRX<float> w(sizes[l + 1], sizes[l]);
    for (long r = 0; r < w.rows(); ++r)
      for (long c = 0; c < w.cols(); ++c, at += 4) w(r, c) = get_f32(buf.data() + at);
    params.weights.push_back(std::move(w));
    VectorX<float> b(sizes[l + 1]);
    for (long r = 0; r < b.size(); ++r, at += 4) b[r] = get_f32(buf.data() + at);
    params.biases.push_back(std::move(b));
  }
  return params;
}

Lemma1Report gradient_difference_lemma1(const Dataset& data, long j, const Mlp<double>& params) {
  const long n = data.size();
  if (n < 2) throw ConfigError("gradient difference needs at least 2 samples");
  if (j < 0 || j >= n) throw ConfigError("sample index " + std::to_string(j) + " out of range");

  const MatrixRXd x = data.features.cast<double>();

  // Route one: two full-batch passes.
  const auto grad_all = loss_and_grad(params, x, data.labels, LossKind::mse, 0.0).grads;
  MatrixRXd x_without(n - 1, x.cols());
  Eigen::VectorXi y_without(n - 1);
  long at = 0;
  for (long i = 0; i < n; ++i) {
    if (i == j) continue;
    x_without.row(at) = x.row(i);
    y_without[at] = data.labels[i];
    ++at;
  }
  const auto grad_without = loss_and_grad(params, x_without, y_without, LossKind::mse, 0.0).grads;

  Lemma1Report report;
  report.delta_direct = flatten(grad_all) - flatten(grad_without);

  // Route two: per-sample gradients recombined by the rearranged form.
  VectorX<double> sum_others = VectorX<double>::Zero(report.delta_direct.size());
  VectorX<double> grad_j;
  MatrixRXd row(1, x.cols());
  Eigen::VectorXi label(1);
  for (long i = 0; i < n; ++i) {
    row.row(0) = x.row(i);
    label[0] = data.labels[i];
    VectorX<double> gi = flatten(loss_and_grad(params, row, label, LossKind::mse, 0.0).grads);
    if (i == j)
      grad_j = gi;
    else
      sum_others += gi;
  }
  const double nd = static_cast<double>(n);
  report.delta_closed = -sum_others / (nd * (nd - 1.0)) + grad_j / nd;
  report.max_abs_diff = (report.delta_direct - report.delta_closed).cwiseAbs().maxCoeff();
  return report;
}

template Mlp<float> init_mlp<float>(const std::vector<int>&, std::uint64_t);
template Mlp<double> init_mlp<double>(const std::vector<int>&, std::uint64_t);
template MatrixRX<float> forward(const Mlp<float>&, const MatrixRX<float>&);
template MatrixRX<double> forward(const Mlp<double>&, const MatrixRX<double>&);
template LossGrad<float> loss_and_grad(const Mlp<float>&, const MatrixRX<float>&,
                                       const Eigen::VectorXi&, LossKind, double);
template LossGrad<double> loss_and_grad(const Mlp<double>&, const MatrixRX<double>&,
                                        const Eigen::VectorXi&, LossKind, double);
template float compute_loss(const Mlp<float>&, const MatrixRX<float>&, const Eigen::VectorXi&,
                            LossKind, double);
template double compute_loss(const Mlp<double>&, const MatrixRX<double>&, const Eigen::VectorXi&,
                             LossKind, double);
template void sgd_step(Mlp<float>&, const Mlp<float>&, Mlp<float>&, double, double);
template void sgd_step(Mlp<double>&, const Mlp<double>&, Mlp<double>&, double, double);
template GradCheckReport finite_diff_check(const Mlp<float>&, const MatrixRX<float>&,
                                           const Eigen::VectorXi&, LossKind, double, double);
template GradCheckReport finite_diff_check(const Mlp<double>&, const MatrixRX<double>&,
                                           const Eigen::VectorXi&, LossKind, double, double);
template MatrixRX<float> extract_features(const Mlp<float>&, const MatrixRX<float>&);
template MatrixRX<double> extract_features(const Mlp<double>&, const MatrixRX<double>&);

}  // namespace yoco
