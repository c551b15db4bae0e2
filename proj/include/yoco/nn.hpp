#pragma once

#include "yoco/common.hpp"
#include "yoco/dataset.hpp"
#include "yoco/dynamics_log.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace yoco {

// Fully-connected net: ReLU on hidden layers, identity output. Templated on
// scalar so training runs in f32 while the gradient/lemma verifiers get
// double headroom. Also doubles as the container for gradients and velocity.
template <class Scalar>
struct Mlp {
  std::vector<MatrixRX<Scalar>> weights;  // weights[l] is (fan_out x fan_in)
  std::vector<VectorX<Scalar>> biases;
  std::vector<int> layer_sizes;           // [D, h_1, ..., C]

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  long num_layers() const { return static_cast<long>(weights.size()); }

  Mlp zeros_like() const {
    Mlp z;
    z.layer_sizes = layer_sizes;
    for (const auto& w : weights) z.weights.push_back(MatrixRX<Scalar>::Zero(w.rows(), w.cols()));
    for (const auto& b : biases) z.biases.push_back(VectorX<Scalar>::Zero(b.size()));
    return z;
  }

  template <class Other>
  Mlp<Other> cast() const {
    Mlp<Other> out;
    out.layer_sizes = layer_sizes;
    for (const auto& w : weights) out.weights.push_back(w.template cast<Other>());
    for (const auto& b : biases) out.biases.push_back(b.template cast<Other>());
    return out;
  }
};

using ModelParams = Mlp<float>;

struct TrainConfig {
  int epochs = 30;
  int batch_size = 64;
  double lr = 0.01;
  double momentum = 0.9;
  double weight_decay = 0.0005;
  // nullopt = schedule at floor(0.5*epochs) and floor(0.75*epochs);
  // an explicit empty list disables decay.
  std::optional<std::vector<int>> lr_milestones;
  double lr_gamma = 0.1;
  LossKind loss_kind = LossKind::cross_entropy;
  std::uint64_t seed = 0;
  bool record_dynamics = true;
  std::vector<int> hidden_sizes = {16};
};

void validate_config(const TrainConfig& cfg);
std::vector<int> resolved_milestones(const TrainConfig& cfg);
// lr * gamma^(number of milestones <= epoch)
double lr_at_epoch(const TrainConfig& cfg, int epoch);

struct GradCheckReport {
  double max_rel_error = 0.0;
  int worst_layer = -1;
  long worst_row = -1;
  long worst_col = -1;  // -1 = bias entry
  double step_size = 0.0;
};

struct Lemma1Report {
  VectorX<double> delta_direct;  // grad over S minus grad over S without j
  VectorX<double> delta_closed;  // same via the rearranged per-sample form
  double max_abs_diff = 0.0;
};

struct TrainResult {
  ModelParams params;
  DynamicsLog log;
  double final_accuracy = 0.0;
};

// He initialization: W ~ N(0, 2/fan_in), biases zero. Values are drawn in
// double and cast, so float and double nets from one seed agree.
template <class Scalar = float>
Mlp<Scalar> init_mlp(const std::vector<int>& layer_sizes, std::uint64_t seed);

template <class Scalar>
MatrixRX<Scalar> forward(const Mlp<Scalar>& params, const MatrixRX<Scalar>& batch);

template <class Scalar>
struct LossGrad {
  Scalar loss = Scalar(0);
  Mlp<Scalar> grads;
};

// Analytic loss + gradients. mse is mean over batch and classes of
// 0.5*(softmax - onehot)^2; cross_entropy is mean softmax cross-entropy.
// weight_decay adds 0.5*wd*|W|^2 on weights (not biases) to both.
template <class Scalar>
LossGrad<Scalar> loss_and_grad(const Mlp<Scalar>& params, const MatrixRX<Scalar>& batch,
                               const Eigen::VectorXi& labels, LossKind loss_kind,
                               double weight_decay = 0.0);

template <class Scalar>
Scalar compute_loss(const Mlp<Scalar>& params, const MatrixRX<Scalar>& batch,
                    const Eigen::VectorXi& labels, LossKind loss_kind,
                    double weight_decay = 0.0);

// v' = momentum*v + g; p' = p - lr*v'. Decay is already folded into g.
template <class Scalar>
void sgd_step(Mlp<Scalar>& params, const Mlp<Scalar>& grads, Mlp<Scalar>& velocity,
              double lr, double momentum);

// Minibatch SGD over the dataset; at each epoch end a full unshuffled pass
// records logits, training accuracy, and mean loss into the DynamicsLog.
TrainResult train_with_dynamics(const Dataset& train, const TrainConfig& cfg);

// Central differences vs analytic gradient, relative error with denominator
// max(|analytic|, |numeric|, 1e-8).
template <class Scalar>
GradCheckReport finite_diff_check(const Mlp<Scalar>& params, const MatrixRX<Scalar>& batch,
                                  const Eigen::VectorXi& labels, LossKind loss_kind,
                                  double step, double weight_decay = 0.0);

// Post-ReLU activations of the last hidden layer, one row per sample.
template <class Scalar>
MatrixRX<Scalar> extract_features(const Mlp<Scalar>& params, const MatrixRX<Scalar>& inputs);

MatrixRXf extract_features(const ModelParams& params, const Dataset& data);

// YMP1 parameter file: magic, u16 version=1, u32 size count, u32 layer
// sizes, then per layer the f32 weight matrix (row-major) and bias vector,
// closed by a u32 CRC32 of all prior bytes. Little-endian.
void save_params(const ModelParams& params, const std::string& path);
ModelParams load_params(const std::string& path);

// Removing sample j from a mean-MSE objective shifts the full-batch gradient
// by -1/(|S|(|S|-1)) * sum_{i != j} g_i + (1/|S|) * g_j. Computes that shift
// both directly (two batch passes) and via the per-sample form, in double,
// without weight decay.
Lemma1Report gradient_difference_lemma1(const Dataset& data, long j, const Mlp<double>& params);

}  // namespace yoco
