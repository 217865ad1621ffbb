#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

namespace specluster {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Counts of entries discarded while canonicalizing an edge list.
struct IngestStats {
  std::size_t duplicates = 0;
  std::size_t self_loops = 0;
};

/// Undirected simple graph in compressed sparse row form.
///
/// Neighbor lists are strictly increasing, the diagonal is empty and the
/// structure is symmetric. Immutable after construction.
class Graph {
 public:
  Graph() = default;

  /// Builds the canonical graph on n nodes. Self-loops and repeated pairs
  /// (in either orientation) are dropped and tallied in `stats` when given.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges,
                          IngestStats* stats = nullptr);

  std::size_t num_nodes() const noexcept { return degrees_.size(); }
  std::size_t num_edges() const noexcept { return col_indices_.size() / 2; }

  std::span<const NodeId> neighbors(std::size_t i) const noexcept {
    return {col_indices_.data() + row_offsets_[i], col_indices_.data() + row_offsets_[i + 1]};
  }
  std::size_t degree(std::size_t i) const noexcept { return degrees_[i]; }
  std::span<const std::size_t> degrees() const noexcept { return degrees_; }
  std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
  std::span<const NodeId> col_indices() const noexcept { return col_indices_; }

  bool has_edge(std::size_t i, std::size_t j) const;
  double mean_degree() const noexcept;
  std::size_t isolated_count() const noexcept;

  /// Each edge once as (u, v) with u < v, in row-major order.
  std::vector<Edge> edges() const;

 private:
  std::vector<std::size_t> row_offsets_{0};
  std::vector<NodeId> col_indices_;
  std::vector<std::size_t> degrees_;
};

struct LoadedGraph {
  Graph graph;
  IngestStats stats;
};

/// Parses whitespace-separated "u v" lines with 0-based ids; '#' lines are
/// comments. n is max id + 1 unless n_hint is larger.
LoadedGraph parse_edge_list(std::istream& in, std::optional<std::size_t> n_hint = std::nullopt);
LoadedGraph load_edge_list(const std::filesystem::path& path,
                           std::optional<std::size_t> n_hint = std::nullopt);

void write_edge_list(std::ostream& out, const Graph& g);
void write_edge_list(const std::filesystem::path& path, const Graph& g);

/// Smallest and largest degree. Requires n >= 1.
std::pair<std::size_t, std::size_t> degree_extremes(const Graph& g);

}  // namespace specluster
