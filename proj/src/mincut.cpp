#include "polarcut/mincut.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <string>

#include "polarcut/error.hpp"

namespace polarcut {

void FlowNetwork::add_arc(std::uint32_t from, std::uint32_t to, double capacity) {
  if (!(capacity >= 0.0) || !std::isfinite(capacity))
    throw Error(errc::invalid_argument, "arc capacity must be finite and non-negative");
  if (from > sink() || to > sink()) throw Error(errc::invalid_argument, "arc endpoint out of range");
  if (to == source()) throw Error(errc::invalid_argument, "arc into the source");
  if (from == sink()) throw Error(errc::invalid_argument, "arc out of the sink");
  arcs_.push_back({from, to, capacity});
}

namespace {

// Search-tree max-flow solver state. Arcs are stored in sister pairs so the
// reverse of arc a is a ^ 1.
class BkSolver {
public:
  explicit BkSolver(const FlowNetwork& net) : n_(net.node_count()) {
    first_.assign(n_, kNone);
    parent_.assign(n_, kNone);
    tr_cap_.assign(n_, 0.0);
    ts_.assign(n_, 0);
    dist_.assign(n_, 0);
    is_sink_.assign(n_, 0);
    queued_.assign(n_, 0);

    std::vector<double> from_source(n_, 0.0), to_sink(n_, 0.0);
    const std::uint32_t s = net.source(), t = net.sink();
    std::size_t inner = 0;
    for (const auto& a : net.arcs())
      if (a.from != s && a.to != t && a.from != a.to) ++inner;
    head_.reserve(2 * inner);
    next_.reserve(2 * inner);
    r_cap_.reserve(2 * inner);

    for (const auto& a : net.arcs()) {
      if (a.from == s && a.to == t) {
        flow_ += a.capacity;
      } else if (a.from == s) {
        from_source[a.to] += a.capacity;
      } else if (a.to == t) {
        to_sink[a.from] += a.capacity;
      } else if (a.from != a.to) {
        add_pair(static_cast<int>(a.from), static_cast<int>(a.to), a.capacity);
      }
    }
    for (std::uint32_t v = 0; v < n_; ++v) {
      flow_ += std::min(from_source[v], to_sink[v]);
      tr_cap_[v] = from_source[v] - to_sink[v];
    }
  }

  double solve() {
    for (std::uint32_t v = 0; v < n_; ++v) {
      if (tr_cap_[v] != 0.0) {
        is_sink_[v] = tr_cap_[v] < 0.0;
        parent_[v] = kTerminal;
        dist_[v] = 1;
        activate(static_cast<int>(v));
      }
    }

    int current = kNone;
    for (;;) {
      int i = current;
      if (i != kNone && parent_[i] == kNone) i = kNone;
      if (i == kNone) {
        i = next_active();
        if (i == kNone) break;
      }

      int bridge = kNone;  // arc from a source-tree node into a sink-tree node
      if (!is_sink_[i]) {
        for (int a = first_[i]; a != kNone; a = next_[a]) {
          if (r_cap_[a] == 0.0) continue;
          const int j = head_[a];
          if (parent_[j] == kNone) {
            is_sink_[j] = 0;
            parent_[j] = a ^ 1;
            ts_[j] = ts_[i];
            dist_[j] = dist_[i] + 1;
            activate(j);
          } else if (is_sink_[j]) {
            bridge = a;
            break;
          } else if (ts_[j] <= ts_[i] && dist_[j] > dist_[i]) {
            parent_[j] = a ^ 1;
            ts_[j] = ts_[i];
            dist_[j] = dist_[i] + 1;
          }
        }
      } else {
        for (int a = first_[i]; a != kNone; a = next_[a]) {
          if (r_cap_[a ^ 1] == 0.0) continue;
          const int j = head_[a];
          if (parent_[j] == kNone) {
            is_sink_[j] = 1;
            parent_[j] = a ^ 1;
            ts_[j] = ts_[i];
            dist_[j] = dist_[i] + 1;
            activate(j);
          } else if (!is_sink_[j]) {
            bridge = a ^ 1;
            break;
          } else if (ts_[j] <= ts_[i] && dist_[j] > dist_[i]) {
            parent_[j] = a ^ 1;
            ts_[j] = ts_[i];
            dist_[j] = dist_[i] + 1;
          }
        }
      }

      ++time_;
      if (bridge != kNone) {
        current = i;
        augment(bridge);
        while (!orphans_.empty()) {
          const int o = orphans_.front();
          orphans_.pop_front();
          if (is_sink_[o]) adopt_sink_orphan(o);
          else adopt_source_orphan(o);
        }
      } else {
        current = kNone;
      }
    }
    return flow_;
  }

  /// Reachability from the source through residual capacity.
  std::vector<std::uint8_t> source_side() const {
    std::vector<std::uint8_t> side(n_ + 2, 0);
    std::vector<int> stack;
    for (std::uint32_t v = 0; v < n_; ++v)
      if (tr_cap_[v] > 0.0) {
        side[v] = 1;
        stack.push_back(static_cast<int>(v));
      }
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int a = first_[v]; a != kNone; a = next_[a]) {
        const int w = head_[a];
        if (r_cap_[a] > 0.0 && !side[w]) {
          side[w] = 1;
          stack.push_back(w);
        }
      }
    }
    for (std::uint32_t v = 0; v < n_; ++v)
      if (side[v] && tr_cap_[v] < 0.0)
        throw Error(errc::internal, "residual path to the sink after max-flow");
    side[n_] = 1;
    return side;
  }

private:
  static constexpr int kNone = -1;
  static constexpr int kTerminal = -2;
  static constexpr int kOrphan = -3;
  static constexpr int kInfiniteDist = std::numeric_limits<int>::max();

  void add_pair(int u, int v, double cap) {
    const int a = static_cast<int>(head_.size());
    head_.push_back(v);
    next_.push_back(first_[u]);
    r_cap_.push_back(cap);
    first_[u] = a;
    head_.push_back(u);
    next_.push_back(first_[v]);
    r_cap_.push_back(0.0);
    first_[v] = a + 1;
  }

  void activate(int v) {
    if (!queued_[v]) {
      queued_[v] = 1;
      active_.push_back(v);
    }
  }

  int next_active() {
    while (!active_.empty()) {
      const int v = active_.front();
      active_.pop_front();
      queued_[v] = 0;
      if (parent_[v] != kNone) return v;
    }
    return kNone;
  }

  void make_orphan_front(int v) {
    parent_[v] = kOrphan;
    orphans_.push_front(v);
  }
  void make_orphan_rear(int v) {
    parent_[v] = kOrphan;
    orphans_.push_back(v);
  }

  void augment(int bridge) {
    double bottleneck = r_cap_[bridge];
    // Source tree: walk from the bridge tail up to the source.
    int v = head_[bridge ^ 1];
    for (;;) {
      const int a = parent_[v];
      if (a == kTerminal) break;
      bottleneck = std::min(bottleneck, r_cap_[a ^ 1]);
      v = head_[a];
    }
    bottleneck = std::min(bottleneck, tr_cap_[v]);
    // Sink tree: walk from the bridge head down to the sink.
    v = head_[bridge];
    for (;;) {
      const int a = parent_[v];
      if (a == kTerminal) break;
      bottleneck = std::min(bottleneck, r_cap_[a]);
      v = head_[a];
    }
    bottleneck = std::min(bottleneck, -tr_cap_[v]);

    r_cap_[bridge ^ 1] += bottleneck;
    r_cap_[bridge] -= bottleneck;

    v = head_[bridge ^ 1];
    for (;;) {
      const int a = parent_[v];
      if (a == kTerminal) break;
      r_cap_[a] += bottleneck;
      r_cap_[a ^ 1] -= bottleneck;
      if (r_cap_[a ^ 1] == 0.0) make_orphan_front(v);
      v = head_[a];
    }
    tr_cap_[v] -= bottleneck;
    if (tr_cap_[v] == 0.0) make_orphan_front(v);

    v = head_[bridge];
    for (;;) {
      const int a = parent_[v];
      if (a == kTerminal) break;
      r_cap_[a ^ 1] += bottleneck;
      r_cap_[a] -= bottleneck;
      if (r_cap_[a] == 0.0) make_orphan_front(v);
      v = head_[a];
    }
    tr_cap_[v] += bottleneck;
    if (tr_cap_[v] == 0.0) make_orphan_front(v);

    flow_ += bottleneck;
  }

  // Distance from j to its terminal through valid parents, or kInfiniteDist
  // when the path runs into an orphan. Marks visited nodes with the current
  // time stamp so later queries terminate early.
  int origin_distance(int j) {
    int d = 0;
    int v = j;
    for (;;) {
      if (ts_[v] == time_) {
        d += dist_[v];
        break;
      }
      const int a = parent_[v];
      ++d;
      if (a == kTerminal) {
        ts_[v] = time_;
        dist_[v] = 1;
        break;
      }
      if (a == kOrphan) return kInfiniteDist;
      v = head_[a];
    }
    int dd = d;
    for (v = j; ts_[v] != time_; v = head_[parent_[v]]) {
      ts_[v] = time_;
      dist_[v] = dd--;
    }
    return d;
  }

  void adopt_source_orphan(int i) {
    int best_arc = kNone;
    int best_dist = kInfiniteDist;
    for (int a = first_[i]; a != kNone; a = next_[a]) {
      if (r_cap_[a ^ 1] == 0.0) continue;
      const int j = head_[a];
      if (is_sink_[j] || parent_[j] == kNone) continue;
      const int d = origin_distance(j);
      if (d < best_dist) {
        best_dist = d;
        best_arc = a;
      }
    }
    if (best_arc != kNone) {
      parent_[i] = best_arc;
      ts_[i] = time_;
      dist_[i] = best_dist + 1;
      return;
    }
    parent_[i] = kNone;
    for (int a = first_[i]; a != kNone; a = next_[a]) {
      const int j = head_[a];
      const int pj = parent_[j];
      if (is_sink_[j] || pj == kNone) continue;
      if (r_cap_[a ^ 1] != 0.0) activate(j);
      if (pj != kTerminal && pj != kOrphan && head_[pj] == i) make_orphan_rear(j);
    }
  }

  void adopt_sink_orphan(int i) {
    int best_arc = kNone;
    int best_dist = kInfiniteDist;
    for (int a = first_[i]; a != kNone; a = next_[a]) {
      if (r_cap_[a] == 0.0) continue;
      const int j = head_[a];
      if (!is_sink_[j] || parent_[j] == kNone) continue;
      const int d = origin_distance(j);
      if (d < best_dist) {
        best_dist = d;
        best_arc = a;
      }
    }
    if (best_arc != kNone) {
      parent_[i] = best_arc;
      ts_[i] = time_;
      dist_[i] = best_dist + 1;
      return;
    }
    parent_[i] = kNone;
    for (int a = first_[i]; a != kNone; a = next_[a]) {
      const int j = head_[a];
      const int pj = parent_[j];
      if (!is_sink_[j] || pj == kNone) continue;
      if (r_cap_[a] != 0.0) activate(j);
      if (pj != kTerminal && pj != kOrphan && head_[pj] == i) make_orphan_rear(j);
    }
  }

  std::uint32_t n_;
  std::vector<int> first_, parent_, dist_;
  std::vector<long long> ts_;
  std::vector<double> tr_cap_;
  std::vector<std::uint8_t> is_sink_, queued_;
  std::vector<int> head_, next_;
  std::vector<double> r_cap_;
  std::deque<int> active_, orphans_;
  long long time_ = 0;
  double flow_ = 0.0;
};

}  // namespace

CutResult max_flow(const FlowNetwork& net) {
  BkSolver solver(net);
  CutResult result;
  result.max_flow_value = solver.solve();
  result.source_side = solver.source_side();
  result.cut_capacity = closed_set_cost(net, result.source_side);
  const double scale = std::max(1.0, std::fabs(result.cut_capacity));
  if (std::fabs(result.max_flow_value - result.cut_capacity) > 1e-6 * scale)
    throw Error(errc::internal, "max-flow and min-cut values disagree");
  return result;
}

double closed_set_cost(const FlowNetwork& net, std::span<const std::uint8_t> side) {
  if (side.size() != static_cast<std::size_t>(net.node_count()) + 2)
    throw Error(errc::invalid_argument, "partition size does not match the network");
  if (!side[net.source()] || side[net.sink()])
    throw Error(errc::invalid_argument, "partition must contain the source and not the sink");
  double total = 0.0;
  for (const auto& a : net.arcs())
    if (side[a.from] && !side[a.to]) total += a.capacity;
  return total;
}

void write_dimacs(const FlowNetwork& net, std::ostream& out) {
  const std::uint64_t n = net.node_count() + 2ull;
  out << "p max " << n << ' ' << net.arcs().size() << '\n';
  out << "n " << net.source() + 1 << " s\n";
  out << "n " << net.sink() + 1 << " t\n";
  out.precision(17);
  for (const auto& a : net.arcs()) out << "a " << a.from + 1 << ' ' << a.to + 1 << ' ' << a.capacity << '\n';
}

}  // namespace polarcut
