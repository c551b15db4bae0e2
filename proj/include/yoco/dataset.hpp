#pragma once

#include "yoco/common.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace yoco {

struct ImageShape {
  int channels = 0;
  int height = 0;
  int width = 0;
  long pixels() const { return static_cast<long>(channels) * height * width; }
};

// Where a decoded patch came from: source sample and grid position.
struct PatchProvenance {
  long source_index = 0;
  int patch_row = 0;
  int patch_col = 0;
};

struct Dataset {
  MatrixRXf features;  // N x D, one row per sample
  Eigen::VectorXi labels;  // length N, values in [0, num_classes)
  int num_classes = 0;
  std::optional<ImageShape> image_shape;

  // Metadata. label_mapping records original -> contiguous ids from load_csv;
  // provenance is filled by multiformation_decode.
  std::map<long, int> label_mapping;
  std::vector<PatchProvenance> provenance;

  long size() const { return features.rows(); }
  long dim() const { return features.cols(); }
};

struct DatasetSplit {
  Dataset train;
  Dataset test;
  std::uint64_t seed = 0;
};

struct BlobSpec {
  int num_classes = 2;
  int samples_per_class = 10;
  int dim = 2;
  double center_separation = 5.0;
  double noise_std = 1.0;
  double label_noise_rate = 0.0;
};

// Throws ConfigError when a Dataset invariant is violated.
void validate_dataset(const Dataset& data);

// CSV, header row required, '.' decimal. label_column is a header name or a
// 0-based column index given as digits. Labels are remapped to contiguous
// [0, C) preserving sorted original order; the mapping lands in the result's
// metadata.
Dataset load_csv(const std::string& path, const std::string& label_column);

// Writes header f0..f{D-1} plus the label column (contiguous labels as-is).
void write_csv(const Dataset& data, const std::string& path,
               const std::string& label_column = "label");

// Isotropic Gaussian blobs: class k centered at center_separation along axis
// k mod D. round(rate*N) samples, chosen by seed, get a label drawn uniformly
// from the other classes. Pure function of (spec, seed).
Dataset generate_blobs(const BlobSpec& spec, std::uint64_t seed);

// Splits every source image into factor^2 non-overlapping patches and scales
// each back to full size with bilinear interpolation (align-corners=false).
// Output order: source order, then row-major patch order.
Dataset multiformation_decode(const Dataset& data, int factor);

// Stratified split: per class, round(test_fraction*n_k) rows go to test.
DatasetSplit split(const Dataset& data, double test_fraction, std::uint64_t seed);

Eigen::VectorXi class_histogram(const Dataset& data);

// YTF binary tensor file plus its parallel YTL label file.
void write_ytf(const Dataset& data, const std::string& tensor_path,
               const std::string& labels_path);
Dataset load_ytf(const std::string& tensor_path, const std::string& labels_path);

}  // namespace yoco
