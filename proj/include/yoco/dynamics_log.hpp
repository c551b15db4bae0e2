#pragma once

#include "yoco/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace yoco {

struct EpochRecord {
  float accuracy = 0.0f;    // training accuracy in [0,1]
  float mean_loss = 0.0f;   // objective value at the epoch-end snapshot
  MatrixRXf logits;         // N x C, raw pre-softmax outputs
};

// Training dynamics: one logits snapshot per epoch plus the labels they
// were produced against. This is the interchange format between the trainer
// and every scoring metric.
struct DynamicsLog {
  std::uint32_t num_samples = 0;
  std::uint32_t num_classes = 0;
  std::vector<std::uint32_t> labels;
  std::vector<EpochRecord> epochs;
  LossKind loss_kind = LossKind::cross_entropy;
  std::uint64_t seed = 0;

  // Carried in memory for report headers; not part of the binary layout.
  std::string config_hash;
  std::string note;

  std::uint32_t num_epochs() const { return static_cast<std::uint32_t>(epochs.size()); }
};

// Byte layout (little-endian throughout):
//   "YDLG" | u16 version=1 | u32 N | u32 C | u32 E | u8 loss_kind | u64 seed
//   | N x u32 labels
//   | E x { f32 accuracy, f32 mean_loss, N*C x f32 logits row-major }
//   | u32 CRC32 of every preceding byte
// Size closed form: 27 + 4N + E*(8 + 4NC) + 4.
void write_log(const DynamicsLog& log, const std::string& path);
DynamicsLog read_log(const std::string& path);

// FNV-1a over the byte serialization above (CRC included); lets score files
// carry a fingerprint of the log they came from.
std::uint64_t log_digest(const DynamicsLog& log);

// All invariant violations as messages; empty means the log is well formed.
std::vector<std::string> validate(const DynamicsLog& log);

}  // namespace yoco
