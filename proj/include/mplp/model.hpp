#ifndef MPLP_MODEL_HPP
#define MPLP_MODEL_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mplp {

using VarIndex = std::size_t;
using EdgeIndex = std::size_t;
using State = std::size_t;

class ModelError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidAssignment : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Dense row-major table; rows index the first variable of an edge.
struct Table {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Table() = default;
  Table(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), values(r * c, fill) {}
  Table(std::size_t r, std::size_t c, std::vector<double> v) : rows(r), cols(c), values(std::move(v)) {}

  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

  Table transposed() const;
  double max() const;

  friend bool operator==(const Table&, const Table&) = default;
};

struct Edge {
  VarIndex i = 0;
  VarIndex j = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Input to the model constructor. Edge endpoints may be given in either
/// order; the table is interpreted with rows indexing `edges[e].first`.
struct ModelParts {
  std::vector<std::size_t> cardinalities;
  std::vector<std::vector<double>> node_potentials;
  std::vector<std::pair<VarIndex, VarIndex>> edges;
  std::vector<Table> edge_potentials;
};

/// Pairwise MRF in log space. Edges are stored with i < j; tables given in
/// the opposite orientation are transposed on construction. Apart from
/// mismatched part counts the constructor accepts malformed content so that
/// validate() can report it; use checked() to reject it up front.
class PairwiseModel {
public:
  PairwiseModel() = default;
  explicit PairwiseModel(ModelParts parts);

  /// Constructs and throws ModelError listing every violation.
  static PairwiseModel checked(ModelParts parts);

  std::size_t num_vars() const { return cardinalities_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t cardinality(VarIndex i) const { return cardinalities_[i]; }
  std::span<const std::size_t> cardinalities() const { return cardinalities_; }

  std::span<const double> node_potential(VarIndex i) const { return node_potentials_[i]; }
  const Edge& edge(EdgeIndex e) const { return edges_[e]; }
  std::span<const Edge> edges() const { return edges_; }
  const Table& edge_potential(EdgeIndex e) const { return edge_potentials_[e]; }

  /// Incident edges of i in ascending edge-index order.
  std::span<const EdgeIndex> incident_edges(VarIndex i) const { return adjacency_[i]; }

  std::optional<EdgeIndex> find_edge(VarIndex a, VarIndex b) const;
  bool has_edge(VarIndex a, VarIndex b) const { return find_edge(a, b).has_value(); }

  /// θ_e read with x_a for endpoint a and x_b for endpoint b, in any order.
  double edge_value(EdgeIndex e, VarIndex a, State xa, State xb) const;

  std::size_t state_space_size_capped(std::size_t cap) const;

  friend bool operator==(const PairwiseModel& a, const PairwiseModel& b) {
    return a.cardinalities_ == b.cardinalities_ && a.node_potentials_ == b.node_potentials_ &&
           a.edges_ == b.edges_ && a.edge_potentials_ == b.edge_potentials_;
  }

private:
  friend PairwiseModel add_zero_chord(const PairwiseModel&, VarIndex, VarIndex);
  void rebuild_index();

  std::vector<std::size_t> cardinalities_;
  std::vector<std::vector<double>> node_potentials_;
  std::vector<Edge> edges_;
  std::vector<Table> edge_potentials_;
  std::vector<std::vector<EdgeIndex>> adjacency_;
  std::map<std::pair<VarIndex, VarIndex>, EdgeIndex> edge_lookup_;
};

struct Assignment {
  std::vector<State> states;

  std::size_t size() const { return states.size(); }
  State operator[](VarIndex i) const { return states[i]; }
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Σ_ij θ_ij(a_i, a_j) + Σ_i θ_i(a_i).
double evaluate(const PairwiseModel& model, const Assignment& a);

struct Diagnostic {
  enum class Kind {
    zero_cardinality,
    node_potential_size,
    non_finite_node_potential,
    edge_out_of_range,
    self_loop,
    duplicate_edge,
    edge_shape_mismatch,
    non_finite_edge_potential,
  };
  Kind kind;
  std::size_t index;  // variable or edge index, depending on kind
  std::string message;
};

/// Empty result means the model is well formed.
std::vector<Diagnostic> validate(const PairwiseModel& model);

/// Copy of `model` with edge {i,j} appended carrying an all-zero table.
PairwiseModel add_zero_chord(const PairwiseModel& model, VarIndex i, VarIndex j);

}  // namespace mplp

#endif
