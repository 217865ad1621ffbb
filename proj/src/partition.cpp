#include "specluster/partition.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <string>

#include "specluster/errors.hpp"

namespace specluster {

Partition::Partition(std::vector<int> labels_, int K_) : labels(std::move(labels_)), K(K_) {
  if (K < 0) throw Error("partition: negative cluster count");
  for (int l : labels)
    if (l < kUnlabeled || l >= K)
      throw Error("partition: label " + std::to_string(l) + " outside [0, " + std::to_string(K) + ")");
}

Partition Partition::from_labels(std::vector<int> labels) {
  int K = 0;
  for (int l : labels) K = std::max(K, l + 1);
  return Partition(std::move(labels), K);
}

std::vector<std::size_t> Partition::cluster_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(K), 0);
  for (int l : labels)
    if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
  return sizes;
}

std::vector<std::vector<std::size_t>> Partition::members() const {
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(K));
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] >= 0) out[static_cast<std::size_t>(labels[i])].push_back(i);
  return out;
}

Partition read_partition(std::istream& in) {
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    auto e = line.find_last_not_of(" \t\r");
    std::string_view tok(line.data() + b, e - b + 1);
    int value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || value < Partition::kUnlabeled)
      throw ParseError(line_no, "expected a cluster label, got '" + std::string(tok) + "'");
    labels.push_back(value);
  }
  if (labels.empty()) throw Error("partition file is empty");
  return Partition::from_labels(std::move(labels));
}

Partition read_partition(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open partition file " + path.string());
  return read_partition(in);
}

void write_partition(std::ostream& out, const Partition& part) {
  for (int l : part.labels) out << l << '\n';
}

void write_partition(const std::filesystem::path& path, const Partition& part) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_partition(out, part);
}

}  // namespace specluster
