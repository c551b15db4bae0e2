#pragma once

#include "yoco/common.hpp"
#include "yoco/scoring.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace yoco {

enum class Prefer { easy, hard };

// A chosen subset of sample indices plus the settings that produced it.
struct SubsetIndex {
  std::vector<long> indices;  // strictly increasing, unique, in [0, N)
  Eigen::VectorXi per_class_counts;  // length C; size 0 when labels were not supplied
  std::string method;
  std::map<std::string, std::string> parameters;

  long size() const { return static_cast<long>(indices.size()); }
};

// Budget expressed either as a grand total or as images-per-class.
struct SelectionTarget {
  std::optional<long> total_count;
  std::optional<long> per_class;
};

void validate_target(const SelectionTarget& target);

// Throws if indices are not strictly increasing within [0, n).
void validate_subset(const SubsetIndex& subset, long n);

// Fills per_class_counts for a subset chosen without label knowledge.
void attach_class_counts(SubsetIndex& subset, const Eigen::VectorXi& labels, int num_classes);

// Global top-count by preference; no class constraint, ties to lower index.
SubsetIndex rank_select(const ScoreVector& scores, const Eigen::VectorXi& labels,
                        int num_classes, long total_count, Prefer prefer);

// Exactly per_class preferred samples from every class. A deficient class is
// an error unless clamp_deficient, which takes the whole class and records
// the shortfall in parameters["clamped_classes"].
SubsetIndex balanced_select(const ScoreVector& scores, const Eigen::VectorXi& labels,
                            int num_classes, long per_class, bool clamp_deficient = false,
                            Prefer prefer = Prefer::easy);

// Coverage-centric sampling: drop the hardest hard_cutoff fraction, cut the
// surviving score range into num_strata equal-width bins, spread the budget
// across nonempty bins smallest-first, draw uniformly inside each bin.
SubsetIndex ccs_select(const ScoreVector& scores, const Eigen::VectorXi& labels,
                       int num_classes, long total_count, double hard_cutoff, int num_strata,
                       std::uint64_t seed);

// Seeded uniform sample without replacement.
SubsetIndex random_select(long n_total, long total_count, std::uint64_t seed);

// Complementary ends of the ranking: both subsets keep round((1-ratio)*N)
// samples, one from the easy end, one from the hard end.
std::pair<SubsetIndex, SubsetIndex> as_easy_hard_split(const ScoreVector& scores,
                                                       const Eigen::VectorXi& labels,
                                                       int num_classes, double ratio);

// CSV of sample_index rows plus a JSON sidecar (csv_path + ".json") carrying
// method, parameters, and per_class_counts.
void write_subset(const SubsetIndex& subset, const std::string& csv_path);
SubsetIndex read_subset(const std::string& csv_path);

}  // namespace yoco
