#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <ostream>
#include <vector>

namespace specluster {

/// Node-to-cluster assignment. A label of -1 marks a node that belongs to no
/// cluster (used for ground truths that only cover part of the graph).
struct Partition {
  static constexpr int kUnlabeled = -1;

  std::vector<int> labels;
  int K = 0;

  Partition() = default;
  Partition(std::vector<int> labels, int K);

  /// Infers K as max label + 1.
  static Partition from_labels(std::vector<int> labels);

  std::size_t size() const noexcept { return labels.size(); }
  bool labeled(std::size_t i) const noexcept { return labels[i] >= 0; }

  /// Node count per cluster, unlabeled nodes excluded.
  std::vector<std::size_t> cluster_sizes() const;
  std::vector<std::vector<std::size_t>> members() const;

  friend bool operator==(const Partition&, const Partition&) = default;
};

/// One integer label per line; line i is the label of node i. '#' starts a comment.
Partition read_partition(std::istream& in);
Partition read_partition(const std::filesystem::path& path);
void write_partition(std::ostream& out, const Partition& part);
void write_partition(const std::filesystem::path& path, const Partition& part);

}  // namespace specluster
