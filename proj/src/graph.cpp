#include "specluster/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>
#include <string_view>

#include "specluster/errors.hpp"

namespace specluster {

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges, IngestStats* stats) {
  IngestStats local;
  std::vector<Edge> canon;
  canon.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw Error("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                      ") out of range for n = " + std::to_string(n));
    if (u == v) {
      ++local.self_loops;
      continue;
    }
    canon.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(canon.begin(), canon.end());
  auto last = std::unique(canon.begin(), canon.end());
  local.duplicates = static_cast<std::size_t>(canon.end() - last);
  canon.erase(last, canon.end());

  Graph g;
  g.degrees_.assign(n, 0);
  for (auto [u, v] : canon) {
    ++g.degrees_[u];
    ++g.degrees_[v];
  }
  g.row_offsets_.assign(n + 1, 0);
  std::partial_sum(g.degrees_.begin(), g.degrees_.end(), g.row_offsets_.begin() + 1);
  g.col_indices_.resize(2 * canon.size());
  std::vector<std::size_t> fill(g.row_offsets_.begin(), g.row_offsets_.end() - 1);
  // canon is sorted by (u, v): appending v to u's row and u to v's row in this
  // order leaves every row strictly increasing.
  for (auto [u, v] : canon) g.col_indices_[fill[v]++] = u;
  for (auto [u, v] : canon) g.col_indices_[fill[u]++] = v;
  for (std::size_t i = 0; i < n; ++i) {
    auto* first = g.col_indices_.data() + g.row_offsets_[i];
    auto* end = g.col_indices_.data() + g.row_offsets_[i + 1];
    if (!std::is_sorted(first, end)) std::sort(first, end);
  }

  if (stats) *stats = local;
  return g;
}

bool Graph::has_edge(std::size_t i, std::size_t j) const {
  auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), static_cast<NodeId>(j));
}

double Graph::mean_degree() const noexcept {
  if (num_nodes() == 0) return 0.0;
  return 2.0 * static_cast<double>(num_edges()) / static_cast<double>(num_nodes());
}

std::size_t Graph::isolated_count() const noexcept {
  return static_cast<std::size_t>(std::count(degrees_.begin(), degrees_.end(), 0));
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (std::size_t u = 0; u < num_nodes(); ++u)
    for (NodeId v : neighbors(u))
      if (v > u) out.emplace_back(static_cast<NodeId>(u), v);
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool next_token(std::string_view& rest, std::string_view& token) {
  rest = trim(rest);
  if (rest.empty()) return false;
  auto end = rest.find_first_of(" \t");
  token = rest.substr(0, end);
  rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
  return true;
}

NodeId parse_id(std::string_view token, std::size_t line) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw ParseError(line, "expected a non-negative integer, got '" + std::string(token) + "'");
  if (value >= std::numeric_limits<NodeId>::max())
    throw ParseError(line, "node id too large: " + std::string(token));
  return static_cast<NodeId>(value);
}

}  // namespace

LoadedGraph parse_edge_list(std::istream& in, std::optional<std::size_t> n_hint) {
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  std::size_t max_id = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest = trim(line);
    if (rest.empty() || rest.front() == '#') continue;
    std::string_view a, b, extra;
    if (!next_token(rest, a) || !next_token(rest, b))
      throw ParseError(line_no, "expected two node ids");
    if (next_token(rest, extra)) throw ParseError(line_no, "unexpected trailing token '" +
                                                              std::string(extra) + "'");
    NodeId u = parse_id(a, line_no);
    NodeId v = parse_id(b, line_no);
    max_id = std::max<std::size_t>({max_id, u, v});
    edges.emplace_back(u, v);
    any = true;
  }
  if (!any) throw Error("edge list is empty");

  std::size_t n = std::max(max_id + 1, n_hint.value_or(0));
  LoadedGraph out;
  out.graph = Graph::from_edges(n, edges, &out.stats);
  return out;
}

LoadedGraph load_edge_list(const std::filesystem::path& path, std::optional<std::size_t> n_hint) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open edge list " + path.string());
  return parse_edge_list(in, n_hint);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# nodes " << g.num_nodes() << " edges " << g.num_edges() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

void write_edge_list(const std::filesystem::path& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_edge_list(out, g);
}

std::pair<std::size_t, std::size_t> degree_extremes(const Graph& g) {
  if (g.num_nodes() == 0) throw Error("degree_extremes: graph has no nodes");
  auto [lo, hi] = std::minmax_element(g.degrees().begin(), g.degrees().end());
  return {*lo, *hi};
}

}  // namespace specluster
