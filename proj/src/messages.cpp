#include "mplp/messages.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace mplp {

namespace {

constexpr double kTwoThirds = 2.0 / 3.0;
constexpr double kOneThird = 1.0 / 3.0;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::size_t endpoint_slot(const PairwiseModel& model, EdgeIndex e, VarIndex v) {
  const auto& edge = model.edge(e);
  if (edge.i == v) return 0;
  if (edge.j == v) return 1;
  throw ClusterError("variable " + std::to_string(v) + " is not an endpoint of edge " + std::to_string(e));
}

std::string triple_name(const std::array<VarIndex, 3>& v) {
  return "{" + std::to_string(v[0]) + "," + std::to_string(v[1]) + "," + std::to_string(v[2]) + "}";
}

// θ_v + Σ over edges incident to v other than `skip` of λ_{e→v}.
std::vector<double> node_sum_excluding(const MessageState& state, const PairwiseModel& model, VarIndex v,
                                       EdgeIndex skip) {
  const auto theta = model.node_potential(v);
  std::vector<double> out(theta.begin(), theta.end());
  for (EdgeIndex e : model.incident_edges(v)) {
    if (e == skip) continue;
    const auto msg = state.edge_to_node(model, e, v);
    for (std::size_t x = 0; x < out.size(); ++x) out[x] += msg[x];
  }
  return out;
}

std::size_t slot_of(const Cluster& c, EdgeIndex e) {
  for (std::size_t s = 0; s < 3; ++s)
    if (c.edge_ids[s] == e) return s;
  return 3;
}

}  // namespace

Cluster make_triplet(const PairwiseModel& model, VarIndex a, VarIndex b, VarIndex c) {
  std::array<VarIndex, 3> v{a, b, c};
  std::sort(v.begin(), v.end());
  if (v[0] == v[1] || v[1] == v[2]) throw ClusterError("triplet variables must be distinct: " + triple_name(v));
  Cluster out{v, {}};
  const std::array<std::pair<std::size_t, std::size_t>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
  for (std::size_t s = 0; s < 3; ++s) {
    auto e = model.find_edge(v[pairs[s].first], v[pairs[s].second]);
    if (!e)
      throw ClusterError("cluster " + triple_name(v) + " references missing edge (" +
                         std::to_string(v[pairs[s].first]) + "," + std::to_string(v[pairs[s].second]) + ")");
    out.edge_ids[s] = *e;
  }
  return out;
}

std::span<const double> MessageState::edge_to_node(const PairwiseModel& model, EdgeIndex e,
                                                   VarIndex endpoint) const {
  return edge_to_node_[e][endpoint_slot(model, e, endpoint)];
}

std::vector<double>& MessageState::edge_to_node(const PairwiseModel& model, EdgeIndex e, VarIndex endpoint) {
  return edge_to_node_[e][endpoint_slot(model, e, endpoint)];
}

std::optional<ClusterIndex> MessageState::find_cluster(const std::array<VarIndex, 3>& sorted_vars) const {
  auto it = cluster_lookup_.find(sorted_vars);
  if (it == cluster_lookup_.end()) return std::nullopt;
  return it->second;
}

ClusterIndex MessageState::register_cluster(const PairwiseModel& model, const Cluster& c) {
  if (cluster_lookup_.contains(c.vars)) throw ClusterError("cluster " + triple_name(c.vars) + " already registered");
  // Re-derive the edge ids so a stale or hand-built Cluster cannot slip in.
  const Cluster canonical = make_triplet(model, c.vars[0], c.vars[1], c.vars[2]);
  if (canonical.vars != c.vars || canonical.edge_ids != c.edge_ids)
    throw ClusterError("cluster " + triple_name(c.vars) + " does not match the model's edges");
  sync_edges(model);

  const ClusterIndex idx = clusters_.size();
  clusters_.push_back(c);
  std::array<Table, 3> tables;
  for (std::size_t s = 0; s < 3; ++s) {
    const auto& edge = model.edge(c.edge_ids[s]);
    tables[s] = Table(model.cardinality(edge.i), model.cardinality(edge.j));
    edge_clusters_[c.edge_ids[s]].emplace_back(idx, s);
  }
  cluster_to_edge_.push_back(std::move(tables));
  cluster_lookup_.emplace(c.vars, idx);
  return idx;
}

void MessageState::sync_edges(const PairwiseModel& model) {
  for (EdgeIndex e = edge_to_edge_.size(); e < model.num_edges(); ++e) {
    const auto& edge = model.edge(e);
    const auto ki = model.cardinality(edge.i);
    const auto kj = model.cardinality(edge.j);
    edge_to_node_.push_back({std::vector<double>(ki, 0.0), std::vector<double>(kj, 0.0)});
    edge_to_edge_.emplace_back(ki, kj);
    edge_clusters_.emplace_back();
  }
}

MessageState init_messages(const PairwiseModel& model, std::span<const Cluster> clusters) {
  MessageState state;
  state.sync_edges(model);
  for (const auto& c : clusters) state.register_cluster(model, c);
  return state;
}

void update_edge(MessageState& state, const PairwiseModel& model, EdgeIndex e) {
  const auto [i, j] = model.edge(e);
  const auto& theta = model.edge_potential(e);
  const auto ki = model.cardinality(i);
  const auto kj = model.cardinality(j);

  // Snapshot of every input before any output of this block is written.
  const auto node_i = node_sum_excluding(state, model, i, e);  // λ_i^{-j} + θ_i
  const auto node_j = node_sum_excluding(state, model, j, e);  // λ_j^{-i} + θ_j
  Table from_clusters(ki, kj);
  for (const auto& [c, slot] : state.clusters_on_edge(e)) {
    const auto& msg = state.cluster_to_edge(c, slot);
    for (std::size_t k = 0; k < msg.values.size(); ++k) from_clusters.values[k] += msg.values[k];
  }

  std::vector<double> to_i(ki, kNegInf);
  std::vector<double> to_j(kj, kNegInf);
  Table to_edge(ki, kj);
  for (std::size_t xi = 0; xi < ki; ++xi) {
    for (std::size_t xj = 0; xj < kj; ++xj) {
      const double shared = from_clusters(xi, xj) + theta(xi, xj);
      to_i[xi] = std::max(to_i[xi], shared + node_j[xj]);
      to_j[xj] = std::max(to_j[xj], shared + node_i[xi]);
      to_edge(xi, xj) = -kTwoThirds * from_clusters(xi, xj) +
                        kOneThird * (node_j[xj] + node_i[xi] + theta(xi, xj));
    }
  }
  for (std::size_t xi = 0; xi < ki; ++xi) to_i[xi] = -kTwoThirds * node_i[xi] + kOneThird * to_i[xi];
  for (std::size_t xj = 0; xj < kj; ++xj) to_j[xj] = -kTwoThirds * node_j[xj] + kOneThird * to_j[xj];

  state.edge_to_node(model, e, i) = std::move(to_i);
  state.edge_to_node(model, e, j) = std::move(to_j);
  state.edge_to_edge(e) = std::move(to_edge);
}

void update_cluster(MessageState& state, const PairwiseModel& model, ClusterIndex c) {
  if (c >= state.clusters().size()) throw ClusterError("cluster index " + std::to_string(c) + " not registered");
  const Cluster cluster = state.clusters()[c];
  const std::array<Table, 3> b{edge_belief(state, model, cluster.edge_ids[0], cluster),
                               edge_belief(state, model, cluster.edge_ids[1], cluster),
                               edge_belief(state, model, cluster.edge_ids[2], cluster)};
  const auto ka = model.cardinality(cluster.vars[0]);
  const auto kb = model.cardinality(cluster.vars[1]);
  const auto kc = model.cardinality(cluster.vars[2]);

  // b[0](xa,xb), b[1](xa,xc), b[2](xb,xc); m[s] maximizes the other two over
  // the variable not in edge s.
  std::array<Table, 3> m{Table(ka, kb, kNegInf), Table(ka, kc, kNegInf), Table(kb, kc, kNegInf)};
  for (std::size_t xa = 0; xa < ka; ++xa)
    for (std::size_t xb = 0; xb < kb; ++xb)
      for (std::size_t xc = 0; xc < kc; ++xc) {
        const double ab = b[0](xa, xb), ac = b[1](xa, xc), bc = b[2](xb, xc);
        m[0](xa, xb) = std::max(m[0](xa, xb), ac + bc);
        m[1](xa, xc) = std::max(m[1](xa, xc), ab + bc);
        m[2](xb, xc) = std::max(m[2](xb, xc), ab + ac);
      }

  for (std::size_t s = 0; s < 3; ++s) {
    Table& out = state.cluster_to_edge(c, s);
    for (std::size_t k = 0; k < out.values.size(); ++k)
      out.values[k] = -kTwoThirds * b[s].values[k] + kOneThird * m[s].values[k];
  }
}

void update_cluster(MessageState& state, const PairwiseModel& model, const Cluster& c) {
  auto idx = state.find_cluster(c);
  if (!idx) throw ClusterError("cluster " + triple_name(c.vars) + " is not registered");
  update_cluster(state, model, *idx);
}

void run_pass(MessageState& state, const PairwiseModel& model) {
  for (EdgeIndex e = 0; e < model.num_edges(); ++e) update_edge(state, model, e);
  for (ClusterIndex c = 0; c < state.clusters().size(); ++c) update_cluster(state, model, c);
  state.mark_pass();
}

double dual_objective(const MessageState& state, const PairwiseModel& model) {
  double total = 0.0;
  for (VarIndex i = 0; i < model.num_vars(); ++i) {
    const auto b = node_belief(state, model, i);
    total += *std::max_element(b.begin(), b.end());
  }
  for (EdgeIndex e = 0; e < model.num_edges(); ++e) total += edge_belief(state, model, e).max();
  return total;
}

std::vector<double> node_belief(const MessageState& state, const PairwiseModel& model, VarIndex i) {
  return node_sum_excluding(state, model, i, model.num_edges());
}

Table edge_belief(const MessageState& state, const PairwiseModel& model, EdgeIndex e) {
  (void)model;
  Table out = state.edge_to_edge(e);
  for (const auto& [c, slot] : state.clusters_on_edge(e)) {
    const auto& msg = state.cluster_to_edge(c, slot);
    for (std::size_t k = 0; k < msg.values.size(); ++k) out.values[k] += msg.values[k];
  }
  return out;
}

Table edge_belief(const MessageState& state, const PairwiseModel& model, EdgeIndex e, const Cluster& exclude) {
  (void)model;
  if (slot_of(exclude, e) == 3)
    throw ClusterError("edge " + std::to_string(e) + " is not part of cluster " + triple_name(exclude.vars));
  const auto skip = state.find_cluster(exclude);
  Table out = state.edge_to_edge(e);
  for (const auto& [c, slot] : state.clusters_on_edge(e)) {
    if (skip && c == *skip) continue;
    const auto& msg = state.cluster_to_edge(c, slot);
    for (std::size_t k = 0; k < msg.values.size(); ++k) out.values[k] += msg.values[k];
  }
  return out;
}

Assignment decode(const MessageState& state, const PairwiseModel& model) {
  Assignment a;
  a.states.resize(model.num_vars());
  for (VarIndex i = 0; i < model.num_vars(); ++i) {
    const auto b = node_belief(state, model, i);
    // max_element returns the first maximum, which is the lowest state.
    a.states[i] = static_cast<State>(std::max_element(b.begin(), b.end()) - b.begin());
  }
  return a;
}

Assignment decode_resolving_ties(const MessageState& state, const PairwiseModel& model, double tie_tolerance) {
  const auto n = model.num_vars();
  std::vector<std::vector<State>> tied(n);
  Assignment a;
  a.states.assign(n, 0);
  std::vector<bool> fixed(n, false);
  for (VarIndex i = 0; i < n; ++i) {
    const auto b = node_belief(state, model, i);
    const double best = *std::max_element(b.begin(), b.end());
    for (State x = 0; x < b.size(); ++x)
      if (b[x] >= best - tie_tolerance) tied[i].push_back(x);
    a.states[i] = tied[i].front();
    fixed[i] = tied[i].size() == 1;
  }
  for (VarIndex i = 0; i < n; ++i) {
    if (fixed[i]) continue;
    double best = kNegInf;
    for (State x : tied[i]) {
      double score = 0.0;
      for (EdgeIndex e : model.incident_edges(i)) {
        const auto& edge = model.edge(e);
        const VarIndex other = edge.i == i ? edge.j : edge.i;
        if (fixed[other]) score += model.edge_value(e, i, x, a[other]);
      }
      if (score > best) {
        best = score;
        a.states[i] = x;
      }
    }
    fixed[i] = true;
  }
  return a;
}

}  // namespace mplp
