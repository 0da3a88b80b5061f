// Copyright 2026 The mldp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mldp/transport.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace mldp {

std::string TransportPlan::ToCsv() const {
  std::string out = absl::StrFormat("# cost=%.17g\nsource,target,mass\n", cost);
  for (const FlowArc& arc : flow) {
    absl::StrAppendFormat(&out, "%d,%d,%.17g\n", arc.source, arc.target,
                          arc.mass);
  }
  return out;
}

namespace internal {

namespace {

constexpr int kNone = -1;

// Primal network simplex on the bipartite transportation graph plus an
// artificial root. Node layout: sources [0, m), sinks [m, m + k), root m + k.
// Arc layout: real arcs i * k + j (source i -> sink j), then one artificial
// arc per source (source -> root) and per sink (root -> sink) with a big-M
// cost. The initial tree is the artificial star, which is strongly feasible
// because every supply and demand is positive; the leaving-arc tie rule
// below keeps it that way, so the method cannot cycle.
class TransportationSimplex {
 public:
  TransportationSimplex(std::span<const double> supply,
                        std::span<const double> demand,
                        std::span<const double> cost)
      : m_(supply.size()),
        k_(demand.size()),
        nodes_(m_ + k_ + 1),
        root_(static_cast<int>(m_ + k_)),
        real_arcs_(m_ * k_),
        cost_(cost) {
    double max_cost = 0.0;
    for (double c : cost) max_cost = std::max(max_cost, c);
    big_ = (max_cost + 1.0) * static_cast<double>(nodes_);
    tolerance_ = big_ * 1e-14;

    const size_t arcs = real_arcs_ + m_ + k_;
    flow_.assign(arcs, 0.0);
    in_tree_.assign(arcs, 0);
    parent_.assign(nodes_, kNone);
    pred_.assign(nodes_, kNone);
    up_.assign(nodes_, 0);
    depth_.assign(nodes_, 0);
    potential_.assign(nodes_, 0.0);
    first_child_.assign(nodes_, kNone);
    next_sibling_.assign(nodes_, kNone);
    prev_sibling_.assign(nodes_, kNone);

    for (size_t i = 0; i < m_; ++i) {
      const size_t arc = real_arcs_ + i;
      flow_[arc] = supply[i];
      Attach(static_cast<int>(i), root_, static_cast<int>(arc), true);
    }
    for (size_t j = 0; j < k_; ++j) {
      const size_t arc = real_arcs_ + m_ + j;
      flow_[arc] = demand[j];
      Attach(static_cast<int>(m_ + j), root_, static_cast<int>(arc), false);
    }
    Refresh(root_);

    block_ = std::max<size_t>(
        64, static_cast<size_t>(std::sqrt(static_cast<double>(arcs))));
  }

  void Run() {
    while (true) {
      const int entering = FindEnteringArc();
      if (entering == kNone) return;
      Pivot(entering);
    }
  }

  std::vector<double> RealFlows() const {
    return {flow_.begin(), flow_.begin() + static_cast<long>(real_arcs_)};
  }

 private:
  int Tail(size_t arc) const {
    if (arc < real_arcs_) return static_cast<int>(arc / k_);
    const size_t a = arc - real_arcs_;
    return a < m_ ? static_cast<int>(a) : root_;
  }
  int Head(size_t arc) const {
    if (arc < real_arcs_) return static_cast<int>(m_ + arc % k_);
    const size_t a = arc - real_arcs_;
    return a < m_ ? root_ : static_cast<int>(m_ + (a - m_));
  }
  double Cost(size_t arc) const {
    return arc < real_arcs_ ? cost_[arc] : big_;
  }
  double ReducedCost(size_t arc) const {
    return Cost(arc) + potential_[Tail(arc)] - potential_[Head(arc)];
  }

  // Links `node` under `parent` through tree arc `arc`; `up` is true when
  // the arc points from node to parent.
  void Attach(int node, int parent, int arc, bool up) {
    parent_[node] = parent;
    pred_[node] = arc;
    up_[node] = up ? 1 : 0;
    in_tree_[arc] = 1;
    prev_sibling_[node] = kNone;
    next_sibling_[node] = first_child_[parent];
    if (first_child_[parent] != kNone) prev_sibling_[first_child_[parent]] = node;
    first_child_[parent] = node;
  }

  void Detach(int node) {
    const int parent = parent_[node];
    if (prev_sibling_[node] != kNone) {
      next_sibling_[prev_sibling_[node]] = next_sibling_[node];
    } else {
      first_child_[parent] = next_sibling_[node];
    }
    if (next_sibling_[node] != kNone) {
      prev_sibling_[next_sibling_[node]] = prev_sibling_[node];
    }
    prev_sibling_[node] = next_sibling_[node] = kNone;
    parent_[node] = kNone;
  }

  // Recomputes depth and potential for the subtree under `top` from its
  // parent (tree arcs have zero reduced cost).
  void Refresh(int top) {
    stack_.clear();
    stack_.push_back(top);
    while (!stack_.empty()) {
      const int node = stack_.back();
      stack_.pop_back();
      const int parent = parent_[node];
      if (parent != kNone) {
        const double c = Cost(static_cast<size_t>(pred_[node]));
        depth_[node] = depth_[parent] + 1;
        potential_[node] =
            up_[node] ? potential_[parent] - c : potential_[parent] + c;
      }
      for (int child = first_child_[node]; child != kNone;
           child = next_sibling_[child]) {
        stack_.push_back(child);
      }
    }
  }

  // Block search pricing: most negative reduced cost within the first block
  // (cyclically from the last position) that contains a candidate.
  int FindEnteringArc() {
    const size_t arcs = flow_.size();
    size_t scanned = 0;
    while (scanned < arcs) {
      double best = -tolerance_;
      int best_arc = kNone;
      const size_t stop = std::min(arcs, scanned + block_);
      for (; scanned < stop; ++scanned) {
        const size_t arc = next_arc_;
        next_arc_ = next_arc_ + 1 == arcs ? 0 : next_arc_ + 1;
        if (in_tree_[arc]) continue;
        const double rc = ReducedCost(arc);
        if (rc < best) {
          best = rc;
          best_arc = static_cast<int>(arc);
        }
      }
      if (best_arc != kNone) return best_arc;
    }
    return kNone;
  }

  void Pivot(int entering) {
    const int first = Tail(static_cast<size_t>(entering));
    const int second = Head(static_cast<size_t>(entering));

    int a = first;
    int b = second;
    while (a != b) {
      if (depth_[a] >= depth_[b]) {
        a = parent_[a];
      } else {
        b = parent_[b];
      }
    }
    const int join = a;

    // Flow is pushed first -> second, up to the join, and back down to
    // first. Strict comparison on the first side and non-strict on the
    // second picks the last blocking arc in cycle order.
    double delta = std::numeric_limits<double>::infinity();
    int leaving_node = kNone;
    bool on_first_side = true;
    for (int u = first; u != join; u = parent_[u]) {
      if (up_[u] && flow_[pred_[u]] < delta) {
        delta = flow_[pred_[u]];
        leaving_node = u;
        on_first_side = true;
      }
    }
    for (int u = second; u != join; u = parent_[u]) {
      if (!up_[u] && flow_[pred_[u]] <= delta) {
        delta = flow_[pred_[u]];
        leaving_node = u;
        on_first_side = false;
      }
    }

    flow_[entering] += delta;
    for (int u = first; u != join; u = parent_[u]) {
      flow_[pred_[u]] += up_[u] ? -delta : delta;
    }
    for (int u = second; u != join; u = parent_[u]) {
      flow_[pred_[u]] += up_[u] ? delta : -delta;
    }

    in_tree_[pred_[leaving_node]] = 0;
    const int cut_in = on_first_side ? first : second;
    const int cut_out = on_first_side ? second : first;

    // Reverse the path cut_in -> leaving_node and hang it from cut_out.
    int node = cut_in;
    int new_parent = cut_out;
    int new_arc = entering;
    bool new_up = Tail(static_cast<size_t>(entering)) == cut_in;
    while (true) {
      const int old_parent = parent_[node];
      const int old_arc = pred_[node];
      const bool old_up = up_[node] != 0;
      Detach(node);
      Attach(node, new_parent, new_arc, new_up);
      if (node == leaving_node) break;
      new_parent = node;
      new_arc = old_arc;
      new_up = !old_up;
      node = old_parent;
    }
    Refresh(cut_in);
  }

  size_t m_;
  size_t k_;
  size_t nodes_;
  int root_;
  size_t real_arcs_;
  std::span<const double> cost_;
  double big_ = 0.0;
  double tolerance_ = 0.0;

  std::vector<double> flow_;
  std::vector<char> in_tree_;
  std::vector<int> parent_;
  std::vector<int> pred_;
  std::vector<char> up_;
  std::vector<int> depth_;
  std::vector<double> potential_;
  std::vector<int> first_child_;
  std::vector<int> next_sibling_;
  std::vector<int> prev_sibling_;
  std::vector<int> stack_;
  size_t block_ = 64;
  size_t next_arc_ = 0;
};

}  // namespace

std::vector<double> SolveTransportation(std::span<const double> supply,
                                        std::span<const double> demand,
                                        std::span<const double> cost) {
  TransportationSimplex simplex(supply, demand, cost);
  simplex.Run();
  return simplex.RealFlows();
}

}  // namespace internal

namespace {

// Positive entries of `d`, rescaled to sum to 1.
void Support(const Distribution& d, std::vector<PointId>& ids,
             std::vector<double>& mass) {
  double total = 0.0;
  for (PointId i = 0; i < d.size(); ++i) {
    if (d[i] > 0.0) {
      ids.push_back(i);
      mass.push_back(d[i]);
      total += d[i];
    }
  }
  for (double& m : mass) m /= total;
}

}  // namespace

absl::StatusOr<TransportPlan> Emd(const MetricSpace& space,
                                  const Distribution& a,
                                  const Distribution& b) {
  if (a.size() != space.size() || b.size() != space.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "distributions of size ", a.size(), " and ", b.size(),
        " on a space of size ", space.size()));
  }
  std::vector<PointId> sources, targets;
  std::vector<double> supply, demand;
  Support(a, sources, supply);
  Support(b, targets, demand);

  // Balance exactly: the residual goes to the largest demand.
  double supply_total = 0.0, demand_total = 0.0;
  for (double s : supply) supply_total += s;
  for (double d : demand) demand_total += d;
  const auto largest = std::max_element(demand.begin(), demand.end());
  *largest += supply_total - demand_total;

  const size_t k = targets.size();
  std::vector<double> cost(sources.size() * k);
  for (size_t i = 0; i < sources.size(); ++i) {
    const std::span<const double> row = space.row(sources[i]);
    for (size_t j = 0; j < k; ++j) cost[i * k + j] = row[targets[j]];
  }
  const std::vector<double> flow =
      internal::SolveTransportation(supply, demand, cost);

  TransportPlan plan;
  for (size_t i = 0; i < sources.size(); ++i) {
    for (size_t j = 0; j < k; ++j) {
      const double mass = flow[i * k + j];
      if (mass <= 0.0) continue;
      plan.flow.push_back({sources[i], targets[j], mass});
      plan.cost += mass * cost[i * k + j];
    }
  }
  return plan;
}

}  // namespace mldp
