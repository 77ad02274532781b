#ifndef MPLP_MESSAGES_HPP
#define MPLP_MESSAGES_HPP

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mplp/model.hpp"

namespace mplp {

using ClusterIndex = std::size_t;

class ClusterError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Triplet cluster. `vars` is sorted ascending and `edge_ids` lists the
/// model edges (v0,v1), (v0,v2), (v1,v2) in that order.
struct Cluster {
  std::array<VarIndex, 3> vars{};
  std::array<EdgeIndex, 3> edge_ids{};
  friend bool operator==(const Cluster&, const Cluster&) = default;
};

/// Builds the triplet over {a,b,c}; throws ClusterError if a pairwise edge
/// is missing from the model or the variables are not distinct.
Cluster make_triplet(const PairwiseModel& model, VarIndex a, VarIndex b, VarIndex c);

/// Dual variables of the cluster-based relaxation: edge->node, edge->edge
/// and cluster->edge messages. Tables follow the model's i < j orientation.
class MessageState {
public:
  MessageState() = default;

  std::size_t pass_count() const { return pass_count_; }
  std::size_t num_edges() const { return edge_to_edge_.size(); }
  std::span<const Cluster> clusters() const { return clusters_; }

  /// Message from edge e into `endpoint`, which must be one of e's variables.
  std::span<const double> edge_to_node(const PairwiseModel& model, EdgeIndex e, VarIndex endpoint) const;
  std::vector<double>& edge_to_node(const PairwiseModel& model, EdgeIndex e, VarIndex endpoint);
  const Table& edge_to_edge(EdgeIndex e) const { return edge_to_edge_[e]; }
  Table& edge_to_edge(EdgeIndex e) { return edge_to_edge_[e]; }
  /// Message from cluster c into its slot-th edge (slot order of Cluster::edge_ids).
  const Table& cluster_to_edge(ClusterIndex c, std::size_t slot) const { return cluster_to_edge_[c][slot]; }
  Table& cluster_to_edge(ClusterIndex c, std::size_t slot) { return cluster_to_edge_[c][slot]; }

  /// (cluster, slot) pairs touching edge e, in registration order.
  std::span<const std::pair<ClusterIndex, std::size_t>> clusters_on_edge(EdgeIndex e) const {
    return edge_clusters_[e];
  }

  std::optional<ClusterIndex> find_cluster(const std::array<VarIndex, 3>& sorted_vars) const;
  std::optional<ClusterIndex> find_cluster(const Cluster& c) const { return find_cluster(c.vars); }

  /// Registers a cluster with zero messages. Throws ClusterError on a
  /// duplicate or when an edge id does not match the model.
  ClusterIndex register_cluster(const PairwiseModel& model, const Cluster& c);

  /// Allocates zero messages for model edges added since the last call.
  void sync_edges(const PairwiseModel& model);

  void mark_pass() { ++pass_count_; }

private:
  std::size_t pass_count_ = 0;
  std::vector<std::array<std::vector<double>, 2>> edge_to_node_;
  std::vector<Table> edge_to_edge_;
  std::vector<std::array<Table, 3>> cluster_to_edge_;
  std::vector<Cluster> clusters_;
  std::vector<std::vector<std::pair<ClusterIndex, std::size_t>>> edge_clusters_;
  std::map<std::array<VarIndex, 3>, ClusterIndex> cluster_lookup_;
};

MessageState init_messages(const PairwiseModel& model, std::span<const Cluster> clusters = {});

/// Recomputes λ_{e→i}, λ_{e→j} and λ_{e→e} together from the current values
/// of every other message.
void update_edge(MessageState& state, const PairwiseModel& model, EdgeIndex e);

/// Recomputes the three cluster->edge messages of a registered cluster.
void update_cluster(MessageState& state, const PairwiseModel& model, ClusterIndex c);
void update_cluster(MessageState& state, const PairwiseModel& model, const Cluster& c);

/// Edges in ascending index order, then clusters in registration order.
void run_pass(MessageState& state, const PairwiseModel& model);

double dual_objective(const MessageState& state, const PairwiseModel& model);

/// b_i = θ_i + Σ_{e∋i} λ_{e→i}
std::vector<double> node_belief(const MessageState& state, const PairwiseModel& model, VarIndex i);

/// b_e = λ_{e→e} + Σ_{c∋e} λ_{c→e}
Table edge_belief(const MessageState& state, const PairwiseModel& model, EdgeIndex e);
/// Same with `exclude`'s own message left out; `exclude` must contain e.
Table edge_belief(const MessageState& state, const PairwiseModel& model, EdgeIndex e, const Cluster& exclude);

/// Per-variable argmax of the node beliefs, ties to the lowest state.
Assignment decode(const MessageState& state, const PairwiseModel& model);

/// Like decode, but variables whose node belief has several maximizers
/// (within `tie_tolerance`) are resolved in index order by the state that
/// maximizes Σ θ_ij(x, a_j) over already-fixed neighbours j. Untied variables
/// are fixed first; remaining ties go to the lowest state.
Assignment decode_resolving_ties(const MessageState& state, const PairwiseModel& model, double tie_tolerance = 1e-9);

}  // namespace mplp

#endif
