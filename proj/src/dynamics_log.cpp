#include "yoco/dynamics_log.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

namespace yoco {

namespace {

constexpr std::size_t kHeaderBytes = 27;  // magic..seed inclusive

void put_u16(std::vector<unsigned char>& buf, std::uint16_t v) {
  buf.push_back(static_cast<unsigned char>(v & 0xff));
  buf.push_back(static_cast<unsigned char>(v >> 8));
}

void put_u32(std::vector<unsigned char>& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::vector<unsigned char>& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::vector<unsigned char>& buf, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(buf, bits);
}

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

float get_f32(const unsigned char* p) {
  std::uint32_t bits = get_u32(p);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

std::uint64_t expected_size(std::uint64_t n, std::uint64_t c, std::uint64_t e) {
  return kHeaderBytes + 4 * n + e * (8 + 4 * n * c) + 4;
}

std::uint32_t crc_of(const unsigned char* data, std::size_t len) {
  return static_cast<std::uint32_t>(
      ::crc32(::crc32(0L, Z_NULL, 0), data, static_cast<uInt>(len)));
}

}  // namespace

std::vector<std::string> validate(const DynamicsLog& log) {
  std::vector<std::string> violations;
  const std::uint32_t n = log.num_samples;
  const std::uint32_t c = log.num_classes;
  if (n < 1) violations.push_back("sample count must be >= 1");
  if (c < 2) violations.push_back("class count must be >= 2");
  if (log.labels.size() != n)
    violations.push_back("label vector has " + std::to_string(log.labels.size()) +
                         " entries, expected " + std::to_string(n));
  for (std::size_t i = 0; i < log.labels.size(); ++i) {
    if (log.labels[i] >= c) {
      violations.push_back("label " + std::to_string(log.labels[i]) + " at sample " +
                           std::to_string(i) + " is outside [0, " + std::to_string(c) + ")");
      break;
    }
  }
  for (std::size_t e = 0; e < log.epochs.size(); ++e) {
    const EpochRecord& rec = log.epochs[e];
    if (!(rec.accuracy >= 0.0f && rec.accuracy <= 1.0f))
      violations.push_back("accuracy " + std::to_string(rec.accuracy) + " at epoch " +
                           std::to_string(e) + " is outside [0, 1]");
    if (!std::isfinite(rec.mean_loss))
      violations.push_back("non-finite mean loss at epoch " + std::to_string(e));
    if (rec.logits.rows() != static_cast<long>(n) || rec.logits.cols() != static_cast<long>(c)) {
      violations.push_back("epoch " + std::to_string(e) + " logits are " +
                           std::to_string(rec.logits.rows()) + "x" +
                           std::to_string(rec.logits.cols()) + ", expected " + std::to_string(n) +
                           "x" + std::to_string(c));
      continue;
    }
    for (long i = 0; i < rec.logits.rows(); ++i) {
      bool bad = false;
      for (long k = 0; k < rec.logits.cols(); ++k) {
        if (!std::isfinite(rec.logits(i, k))) {
          violations.push_back("non-finite logit at epoch " + std::to_string(e) + ", sample " +
                               std::to_string(i));
          bad = true;
          break;
        }
      }
      if (bad) break;
    }
  }
  return violations;
}

namespace {

std::vector<unsigned char> serialize(const DynamicsLog& log) {
  std::vector<unsigned char> buf;
  buf.reserve(expected_size(log.num_samples, log.num_classes, log.num_epochs()));
  for (char m : {'Y', 'D', 'L', 'G'}) buf.push_back(static_cast<unsigned char>(m));
  put_u16(buf, 1);
  put_u32(buf, log.num_samples);
  put_u32(buf, log.num_classes);
  put_u32(buf, log.num_epochs());
  buf.push_back(static_cast<unsigned char>(log.loss_kind));
  put_u64(buf, log.seed);
  for (std::uint32_t label : log.labels) put_u32(buf, label);
  for (const EpochRecord& rec : log.epochs) {
    put_f32(buf, rec.accuracy);
    put_f32(buf, rec.mean_loss);
    for (long i = 0; i < rec.logits.rows(); ++i)
      for (long k = 0; k < rec.logits.cols(); ++k) put_f32(buf, rec.logits(i, k));
  }
  put_u32(buf, crc_of(buf.data(), buf.size()));
  return buf;
}

}  // namespace

void write_log(const DynamicsLog& log, const std::string& path) {
  auto violations = validate(log);
  if (!violations.empty())
    throw ConfigError("refusing to write invalid log: " + violations.front());

  const std::vector<unsigned char> buf = serialize(log);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

DynamicsLog read_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());

  if (buf.size() < 4 || std::memcmp(buf.data(), "YDLG", 4) != 0)
    throw IoError("'" + path + "' is not a YDLG dynamics log (bad magic)");
  if (buf.size() < kHeaderBytes)
    throw IoError("'" + path + "' truncated at epoch 0 (incomplete header)");

  const std::uint16_t version = get_u16(buf.data() + 4);
  if (version != 1)
    throw IoError("'" + path + "' has version " + std::to_string(version) + ", expected 1");

  const std::uint32_t n = get_u32(buf.data() + 6);
  const std::uint32_t c = get_u32(buf.data() + 10);
  const std::uint32_t e = get_u32(buf.data() + 14);
  if (n < 1 || c < 2)
    throw IoError("'" + path + "' declares N=" + std::to_string(n) + ", C=" + std::to_string(c));
  const unsigned char loss_tag = buf[18];
  if (loss_tag > 1)
    throw IoError("'" + path + "' has unknown loss kind tag " + std::to_string(loss_tag));

  const std::uint64_t want = expected_size(n, c, e);
  if (buf.size() != want) {
    if (buf.size() < want) {
      const std::uint64_t record = 8 + 4ULL * n * c;
      const std::uint64_t past_labels =
          buf.size() > kHeaderBytes + 4ULL * n ? buf.size() - kHeaderBytes - 4ULL * n : 0;
      throw IoError("'" + path + "' truncated at epoch " + std::to_string(past_labels / record) +
                    " (" + std::to_string(buf.size()) + " of " + std::to_string(want) + " bytes)");
    }
    throw IoError("'" + path + "' has " + std::to_string(buf.size() - want) +
                  " trailing bytes beyond the declared layout");
  }

  const std::uint32_t stored_crc = get_u32(buf.data() + buf.size() - 4);
  const std::uint32_t actual_crc = crc_of(buf.data(), buf.size() - 4);
  if (stored_crc != actual_crc)
    throw IoError("'" + path + "' failed its CRC32 integrity check (file corrupt)");

  DynamicsLog log;
  log.num_samples = n;
  log.num_classes = c;
  log.loss_kind = static_cast<LossKind>(loss_tag);
  log.seed = get_u64(buf.data() + 19);

  std::size_t at = kHeaderBytes;
  log.labels.resize(n);
  for (std::uint32_t i = 0; i < n; ++i, at += 4) log.labels[i] = get_u32(buf.data() + at);

  log.epochs.resize(e);
  for (std::uint32_t t = 0; t < e; ++t) {
    EpochRecord& rec = log.epochs[t];
    rec.accuracy = get_f32(buf.data() + at);
    at += 4;
    rec.mean_loss = get_f32(buf.data() + at);
    at += 4;
    rec.logits.resize(n, c);
    for (std::uint32_t i = 0; i < n; ++i)
      for (std::uint32_t k = 0; k < c; ++k, at += 4) rec.logits(i, k) = get_f32(buf.data() + at);
  }

  auto violations = validate(log);
  if (!violations.empty()) throw IoError("'" + path + "' is invalid: " + violations.front());
  return log;
}

std::uint64_t log_digest(const DynamicsLog& log) {
  const std::vector<unsigned char> buf = serialize(log);
  return fnv1a64(buf.data(), buf.size());
}

}  // namespace yoco
