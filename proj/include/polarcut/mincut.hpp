#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace polarcut {

/// Directed network with implicit terminals: non-terminal nodes are
/// 0..node_count()-1, the source is node_count() and the sink node_count()+1.
/// Parallel arcs are allowed and kept independent.
class FlowNetwork {
public:
  struct Arc {
    std::uint32_t from;
    std::uint32_t to;
    double capacity;
  };

  FlowNetwork() = default;
  explicit FlowNetwork(std::uint32_t node_count) : node_count_(node_count) {}

  std::uint32_t node_count() const { return node_count_; }
  std::uint32_t source() const { return node_count_; }
  std::uint32_t sink() const { return node_count_ + 1; }

  /// Capacity must be finite and >= 0; arcs into the source or out of the
  /// sink are rejected.
  void add_arc(std::uint32_t from, std::uint32_t to, double capacity);
  void reserve(std::size_t arcs) { arcs_.reserve(arcs); }

  std::span<const Arc> arcs() const { return arcs_; }

private:
  std::uint32_t node_count_ = 0;
  std::vector<Arc> arcs_;
};

/// Partition indexed like FlowNetwork nodes, terminals included
/// (size node_count()+2). source_side[source()] is always 1.
struct CutResult {
  double max_flow_value = 0.0;
  std::vector<std::uint8_t> source_side;
  double cut_capacity = 0.0;
};

/// Exact maximum flow by Boykov-Kolmogorov augmenting paths over two search
/// trees that are reused between augmentations. The reported partition is the
/// set of nodes reachable from the source in the final residual graph, i.e.
/// the unique minimal source side among all minimum cuts.
CutResult max_flow(const FlowNetwork& net);

/// Sum of capacities of arcs leaving `source_side`. Throws invalid_argument
/// when the partition has the wrong size, excludes the source or holds the sink.
double closed_set_cost(const FlowNetwork& net, std::span<const std::uint8_t> source_side);

/// DIMACS max-flow text (`p max`, `n id s|t`, `a u v cap`), nodes 1-based
/// with the source and sink numbered last.
void write_dimacs(const FlowNetwork& net, std::ostream& out);

}  // namespace polarcut
