#include "yoco/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <vector>

namespace yoco {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

bool parse_double(const std::string& cell, double& value) {
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last && !cell.empty();
}

void write_u32le(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32le(std::istream& in, const std::string& what) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw IoError("unexpected end of file while reading " + what);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

// Precomputed 1D bilinear taps for resizing src -> dst (align-corners=false).
struct AxisTaps {
  std::vector<long> lo, hi;
  std::vector<double> frac;
};

AxisTaps bilinear_taps(long src, long dst) {
  AxisTaps taps;
  taps.lo.resize(dst);
  taps.hi.resize(dst);
  taps.frac.resize(dst);
  const double scale = static_cast<double>(src) / static_cast<double>(dst);
  for (long j = 0; j < dst; ++j) {
    double pos = (static_cast<double>(j) + 0.5) * scale - 0.5;
    double base = std::floor(pos);
    double frac = pos - base;
    long lo = static_cast<long>(base);
    long hi = lo + 1;
    taps.lo[j] = std::clamp(lo, 0L, src - 1);
    taps.hi[j] = std::clamp(hi, 0L, src - 1);
    taps.frac[j] = frac;
  }
  return taps;
}

}  // namespace

void validate_dataset(const Dataset& data) {
  const long n = data.features.rows();
  const long d = data.features.cols();
  if (n < 1 || d < 1) throw ConfigError("dataset must have at least one row and one column");
  if (data.labels.size() != n)
    throw ConfigError("dataset has " + std::to_string(n) + " rows but " +
                      std::to_string(data.labels.size()) + " labels");
  if (data.num_classes < 2) throw ConfigError("dataset needs at least 2 classes");
  for (long i = 0; i < n; ++i) {
    int y = data.labels[i];
    if (y < 0 || y >= data.num_classes)
      throw ConfigError("label " + std::to_string(y) + " at row " + std::to_string(i) +
                        " is outside [0, " + std::to_string(data.num_classes) + ")");
  }
  if (data.image_shape && data.image_shape->pixels() != d)
    throw ConfigError("image shape product " + std::to_string(data.image_shape->pixels()) +
                      " does not match feature dimension " + std::to_string(d));
}

Dataset load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path + "' is empty");
  std::vector<std::string> header = split_cells(line);

  // Resolve the label column: header name first, then a bare 0-based index.
  long label_idx = -1;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == label_column) label_idx = static_cast<long>(c);
  if (label_idx < 0 && !label_column.empty() &&
      label_column.find_first_not_of("0123456789") == std::string::npos) {
    long idx = std::stol(label_column);
    if (idx >= 0 && idx < static_cast<long>(header.size())) label_idx = idx;
  }
  if (label_idx < 0)
    throw IoError("label column '" + label_column + "' not found in '" + path + "'");

  const long width = static_cast<long>(header.size());
  if (width < 2) throw IoError("'" + path + "' has no feature columns");

  std::vector<std::vector<double>> rows;
  std::vector<long> raw_labels;
  long data_row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++data_row;
    std::vector<std::string> cells = split_cells(line);
    if (static_cast<long>(cells.size()) != width)
      throw IoError("row " + std::to_string(data_row) + " of '" + path + "' has " +
                    std::to_string(cells.size()) + " cells, expected " + std::to_string(width));
    std::vector<double> feats;
    feats.reserve(width - 1);
    for (long c = 0; c < width; ++c) {
      double value = 0.0;
      if (!parse_double(cells[c], value))
        throw IoError("non-numeric cell '" + cells[c] + "' at row " + std::to_string(data_row) +
                      ", column '" + header[c] + "' of '" + path + "'");
      if (c == label_idx) {
        if (value != std::rint(value))
          throw IoError("label '" + cells[c] + "' at row " + std::to_string(data_row) +
                        " of '" + path + "' is not an integer");
        raw_labels.push_back(static_cast<long>(std::llrint(value)));
      } else {
        feats.push_back(value);
      }
    }
    rows.push_back(std::move(feats));
  }
  if (rows.empty()) throw IoError("'" + path + "' has no data rows");

  // Remap labels to contiguous [0, C), sorted by original value.
  std::vector<long> uniq = raw_labels;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  if (uniq.size() < 2)
    throw IoError("'" + path + "' contains a single class; need at least 2");

  Dataset data;
  data.num_classes = static_cast<int>(uniq.size());
  for (std::size_t k = 0; k < uniq.size(); ++k)
    data.label_mapping[uniq[k]] = static_cast<int>(k);

  const long n = static_cast<long>(rows.size());
  const long d = width - 1;
  data.features.resize(n, d);
  data.labels.resize(n);
  for (long i = 0; i < n; ++i) {
    for (long c = 0; c < d; ++c) data.features(i, c) = static_cast<float>(rows[i][c]);
    data.labels[i] = data.label_mapping.at(raw_labels[i]);
  }
  validate_dataset(data);
  return data;
}

void write_csv(const Dataset& data, const std::string& path, const std::string& label_column) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (long c = 0; c < data.dim(); ++c) out << "f" << c << ",";
  out << label_column << "\n";
  char buf[64];
  for (long i = 0; i < data.size(); ++i) {
    for (long c = 0; c < data.dim(); ++c) {
      std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(data.features(i, c)));
      out << buf << ",";
    }
    out << data.labels[i] << "\n";
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

Dataset generate_blobs(const BlobSpec& spec, std::uint64_t seed) {
  if (spec.num_classes < 2) throw ConfigError("generate_blobs: need at least 2 classes");
  if (spec.samples_per_class < 1) throw ConfigError("generate_blobs: samples_per_class must be >= 1");
  if (spec.dim < 1) throw ConfigError("generate_blobs: dim must be >= 1");
  if (!(spec.center_separation > 0)) throw ConfigError("generate_blobs: center_separation must be > 0");
  if (!(spec.noise_std > 0)) throw ConfigError("generate_blobs: noise_std must be > 0");
  if (spec.label_noise_rate < 0 || spec.label_noise_rate >= 1)
    throw ConfigError("generate_blobs: label_noise_rate must be in [0, 1)");

  const long n = static_cast<long>(spec.num_classes) * spec.samples_per_class;
  Dataset data;
  data.num_classes = spec.num_classes;
  data.features.resize(n, spec.dim);
  data.labels.resize(n);

  std::mt19937_64 rng(mix_seed(seed, 0));
  std::normal_distribution<double> normal(0.0, 1.0);
  long row = 0;
  for (int k = 0; k < spec.num_classes; ++k) {
    const int axis = k % spec.dim;
    for (int s = 0; s < spec.samples_per_class; ++s, ++row) {
      for (int c = 0; c < spec.dim; ++c) {
        double center = (c == axis) ? spec.center_separation : 0.0;
        data.features(row, c) = static_cast<float>(center + spec.noise_std * normal(rng));
      }
      data.labels[row] = k;
    }
  }

  const long flips = std::llround(spec.label_noise_rate * static_cast<double>(n));
  if (flips > 0) {
    std::mt19937_64 noise_rng(mix_seed(seed, 1));
    std::vector<long> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), noise_rng);
    std::uniform_int_distribution<int> other(0, spec.num_classes - 2);
    for (long i = 0; i < flips; ++i) {
      int old = data.labels[order[i]];
      int pick = other(noise_rng);
      data.labels[order[i]] = (pick >= old) ? pick + 1 : pick;
    }
  }
  return data;
}

Dataset multiformation_decode(const Dataset& data, int factor) {
  if (!data.image_shape)
    throw ConfigError("multiformation_decode: dataset has no image shape");
  if (factor < 1) throw ConfigError("multiformation_decode: factor must be >= 1");
  const ImageShape shape = *data.image_shape;
  if (shape.height % factor != 0 || shape.width % factor != 0)
    throw ConfigError("multiformation_decode: image " + std::to_string(shape.height) + "x" +
                      std::to_string(shape.width) + " is not divisible into " +
                      std::to_string(factor) + "x" + std::to_string(factor) + " patches");
  validate_dataset(data);

  const long n = data.size();
  const int ch = shape.channels, h = shape.height, w = shape.width;
  const int ph = h / factor, pw = w / factor;
  const long patches = static_cast<long>(factor) * factor;

  Dataset out;
  out.num_classes = data.num_classes;
  out.image_shape = shape;
  out.label_mapping = data.label_mapping;
  out.features.resize(n * patches, data.dim());
  out.labels.resize(n * patches);
  out.provenance.reserve(n * patches);

  const AxisTaps ty = bilinear_taps(ph, h);
  const AxisTaps tx = bilinear_taps(pw, w);

  long out_row = 0;
  for (long i = 0; i < n; ++i) {
    const float* src = data.features.row(i).data();
    for (int pr = 0; pr < factor; ++pr) {
      for (int pc = 0; pc < factor; ++pc, ++out_row) {
        float* dst = out.features.row(out_row).data();
        for (int c = 0; c < ch; ++c) {
          const float* plane = src + static_cast<long>(c) * h * w;
          // patch(py, px) lives at source pixel (pr*ph + py, pc*pw + px)
          auto at = [&](long py, long px) {
            return static_cast<double>(
                plane[(static_cast<long>(pr) * ph + py) * w + (static_cast<long>(pc) * pw + px)]);
          };
          for (int y = 0; y < h; ++y) {
            const double fy = ty.frac[y];
            for (int x = 0; x < w; ++x) {
              const double fx = tx.frac[x];
              double top = at(ty.lo[y], tx.lo[x]) * (1.0 - fx) + at(ty.lo[y], tx.hi[x]) * fx;
              double bot = at(ty.hi[y], tx.lo[x]) * (1.0 - fx) + at(ty.hi[y], tx.hi[x]) * fx;
              dst[static_cast<long>(c) * h * w + static_cast<long>(y) * w + x] =
                  static_cast<float>(top * (1.0 - fy) + bot * fy);
            }
          }
        }
        out.labels[out_row] = data.labels[i];
        out.provenance.push_back({i, pr, pc});
      }
    }
  }
  return out;
}

DatasetSplit split(const Dataset& data, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ConfigError("split: test_fraction must lie in (0, 1)");
  validate_dataset(data);

  std::vector<std::vector<long>> by_class(data.num_classes);
  for (long i = 0; i < data.size(); ++i) by_class[data.labels[i]].push_back(i);

  std::vector<char> in_test(data.size(), 0);
  std::mt19937_64 rng(mix_seed(seed, 2));
  for (int k = 0; k < data.num_classes; ++k) {
    auto& idx = by_class[k];
    if (idx.empty()) continue;
    const long take = std::llround(test_fraction * static_cast<double>(idx.size()));
    if (take == 0 || take == static_cast<long>(idx.size()))
      throw InfeasibleError("split: class " + std::to_string(k) + " with " +
                            std::to_string(idx.size()) +
                            " samples cannot populate both parts at fraction " +
                            std::to_string(test_fraction));
    std::shuffle(idx.begin(), idx.end(), rng);
    for (long t = 0; t < take; ++t) in_test[idx[t]] = 1;
  }

  auto gather = [&](bool want_test) {
    Dataset part;
    part.num_classes = data.num_classes;
    part.image_shape = data.image_shape;
    part.label_mapping = data.label_mapping;
    std::vector<long> rows;
    for (long i = 0; i < data.size(); ++i)
      if (static_cast<bool>(in_test[i]) == want_test) rows.push_back(i);
    part.features.resize(static_cast<long>(rows.size()), data.dim());
    part.labels.resize(static_cast<long>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      part.features.row(static_cast<long>(r)) = data.features.row(rows[r]);
      part.labels[static_cast<long>(r)] = data.labels[rows[r]];
      if (!data.provenance.empty()) part.provenance.push_back(data.provenance[rows[r]]);
    }
    return part;
  };

  DatasetSplit result;
  result.train = gather(false);
  result.test = gather(true);
  result.seed = seed;
  return result;
}

Eigen::VectorXi class_histogram(const Dataset& data) {
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(data.num_classes);
  for (long i = 0; i < data.size(); ++i) counts[data.labels[i]] += 1;
  return counts;
}

void write_ytf(const Dataset& data, const std::string& tensor_path,
               const std::string& labels_path) {
  {
    std::ofstream out(tensor_path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + tensor_path + "' for writing");
    out.write("YTF1", 4);
    out.put(static_cast<char>(1));  // dtype: f32
    if (data.image_shape) {
      out.put(static_cast<char>(4));
      write_u32le(out, static_cast<std::uint32_t>(data.size()));
      write_u32le(out, static_cast<std::uint32_t>(data.image_shape->channels));
      write_u32le(out, static_cast<std::uint32_t>(data.image_shape->height));
      write_u32le(out, static_cast<std::uint32_t>(data.image_shape->width));
    } else {
      out.put(static_cast<char>(2));
      write_u32le(out, static_cast<std::uint32_t>(data.size()));
      write_u32le(out, static_cast<std::uint32_t>(data.dim()));
    }
    out.write(reinterpret_cast<const char*>(data.features.data()),
              static_cast<std::streamsize>(sizeof(float) * data.size() * data.dim()));
    if (!out) throw IoError("write to '" + tensor_path + "' failed");
  }
  {
    std::ofstream out(labels_path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + labels_path + "' for writing");
    out.write("YTL1", 4);
    write_u32le(out, static_cast<std::uint32_t>(data.size()));
    write_u32le(out, static_cast<std::uint32_t>(data.num_classes));
    for (long i = 0; i < data.size(); ++i)
      write_u32le(out, static_cast<std::uint32_t>(data.labels[i]));
    if (!out) throw IoError("write to '" + labels_path + "' failed");
  }
}

Dataset load_ytf(const std::string& tensor_path, const std::string& labels_path) {
  Dataset data;
  {
    std::ifstream in(tensor_path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + tensor_path + "'");
    char magic[4];
    if (!in.read(magic, 4) || std::string(magic, 4) != "YTF1")
      throw IoError("'" + tensor_path + "' is not a YTF1 tensor file");
    int dtype = in.get();
    if (dtype != 1) throw IoError("'" + tensor_path + "' has unsupported dtype tag " +
                                  std::to_string(dtype));
    int rank = in.get();
    if (rank != 2 && rank != 4)
      throw IoError("'" + tensor_path + "' has unsupported rank " + std::to_string(rank));
    std::vector<std::uint32_t> dims(rank);
    for (int r = 0; r < rank; ++r) dims[r] = read_u32le(in, "tensor dims");
    long n = dims[0];
    long d = 1;
    for (int r = 1; r < rank; ++r) d *= dims[r];
    if (n < 1 || d < 1) throw IoError("'" + tensor_path + "' has empty dimensions");
    data.features.resize(n, d);
    if (!in.read(reinterpret_cast<char*>(data.features.data()),
                 static_cast<std::streamsize>(sizeof(float) * n * d)))
      throw IoError("'" + tensor_path + "' payload is truncated");
    if (rank == 4)
      data.image_shape = ImageShape{static_cast<int>(dims[1]), static_cast<int>(dims[2]),
                                    static_cast<int>(dims[3])};
  }
  {
    std::ifstream in(labels_path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + labels_path + "'");
    char magic[4];
    if (!in.read(magic, 4) || std::string(magic, 4) != "YTL1")
      throw IoError("'" + labels_path + "' is not a YTL1 label file");
    std::uint32_t count = read_u32le(in, "label count");
    std::uint32_t classes = read_u32le(in, "class count");
    if (static_cast<long>(count) != data.size())
      throw IoError("'" + labels_path + "' holds " + std::to_string(count) + " labels for " +
                    std::to_string(data.size()) + " tensor rows");
    data.labels.resize(count);
    for (std::uint32_t i = 0; i < count; ++i)
      data.labels[i] = static_cast<int>(read_u32le(in, "labels"));
    data.num_classes = static_cast<int>(classes);
  }
  validate_dataset(data);
  return data;
}

}  // namespace yoco
