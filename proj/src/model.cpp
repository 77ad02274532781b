#include "mplp/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mplp {

Table Table::transposed() const {
  Table t(cols, rows);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double Table::max() const {
  return values.empty() ? -std::numeric_limits<double>::infinity()
                        : *std::max_element(values.begin(), values.end());
}

PairwiseModel::PairwiseModel(ModelParts parts)
    : cardinalities_(std::move(parts.cardinalities)),
      node_potentials_(std::move(parts.node_potentials)) {
  if (node_potentials_.size() != cardinalities_.size())
    throw ModelError("node potential count " + std::to_string(node_potentials_.size()) +
                     " does not match variable count " + std::to_string(cardinalities_.size()));
  if (parts.edge_potentials.size() != parts.edges.size())
    throw ModelError("edge potential count " + std::to_string(parts.edge_potentials.size()) +
                     " does not match edge count " + std::to_string(parts.edges.size()));

  edges_.reserve(parts.edges.size());
  edge_potentials_.reserve(parts.edges.size());
  for (std::size_t e = 0; e < parts.edges.size(); ++e) {
    auto [a, b] = parts.edges[e];
    if (a > b) {
      edges_.push_back({b, a});
      edge_potentials_.push_back(parts.edge_potentials[e].transposed());
    } else {
      edges_.push_back({a, b});
      edge_potentials_.push_back(std::move(parts.edge_potentials[e]));
    }
  }
  rebuild_index();
}

PairwiseModel PairwiseModel::checked(ModelParts parts) {
  PairwiseModel m(std::move(parts));
  auto diags = validate(m);
  if (!diags.empty()) {
    std::ostringstream os;
    os << "invalid model:";
    for (const auto& d : diags) os << "\n  " << d.message;
    throw ModelError(os.str());
  }
  return m;
}

void PairwiseModel::rebuild_index() {
  adjacency_.assign(cardinalities_.size(), {});
  edge_lookup_.clear();
  for (EdgeIndex e = 0; e < edges_.size(); ++e) {
    const auto [i, j] = edges_[e];
    if (i >= num_vars() || j >= num_vars() || i == j) continue;
    if (!edge_lookup_.emplace(std::pair{i, j}, e).second) continue;
    adjacency_[i].push_back(e);
    adjacency_[j].push_back(e);
  }
}

std::optional<EdgeIndex> PairwiseModel::find_edge(VarIndex a, VarIndex b) const {
  if (a > b) std::swap(a, b);
  auto it = edge_lookup_.find({a, b});
  if (it == edge_lookup_.end()) return std::nullopt;
  return it->second;
}

double PairwiseModel::edge_value(EdgeIndex e, VarIndex a, State xa, State xb) const {
  const auto& t = edge_potentials_[e];
  return edges_[e].i == a ? t(xa, xb) : t(xb, xa);
}

std::size_t PairwiseModel::state_space_size_capped(std::size_t cap) const {
  std::size_t total = 1;
  for (auto k : cardinalities_) {
    if (k == 0) return 0;
    if (total > cap / k) return cap + 1;
    total *= k;
  }
  return total;
}

double evaluate(const PairwiseModel& model, const Assignment& a) {
  if (a.size() != model.num_vars())
    throw InvalidAssignment("assignment has " + std::to_string(a.size()) + " entries, model has " +
                            std::to_string(model.num_vars()) + " variables");
  for (VarIndex i = 0; i < a.size(); ++i)
    if (a[i] >= model.cardinality(i))
      throw InvalidAssignment("state " + std::to_string(a[i]) + " out of range for variable " +
                              std::to_string(i) + " with " + std::to_string(model.cardinality(i)) +
                              " states");

  double total = 0.0;
  for (EdgeIndex e = 0; e < model.num_edges(); ++e) {
    const auto [i, j] = model.edge(e);
    total += model.edge_potential(e)(a[i], a[j]);
  }
  for (VarIndex i = 0; i < model.num_vars(); ++i) total += model.node_potential(i)[a[i]];
  return total;
}

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

std::vector<Diagnostic> validate(const PairwiseModel& model) {
  using Kind = Diagnostic::Kind;
  std::vector<Diagnostic> out;
  auto report = [&](Kind kind, std::size_t index, std::string msg) {
    out.push_back({kind, index, std::move(msg)});
  };

  const auto n = model.num_vars();
  for (VarIndex i = 0; i < n; ++i) {
    const auto k = model.cardinality(i);
    const auto pot = model.node_potential(i);
    if (k == 0) report(Kind::zero_cardinality, i, "variable " + std::to_string(i) + " has zero states");
    if (pot.size() != k)
      report(Kind::node_potential_size, i,
             "variable " + std::to_string(i) + ": node potential has " + std::to_string(pot.size()) +
                 " entries, expected " + std::to_string(k));
    if (!all_finite(pot))
      report(Kind::non_finite_node_potential, i,
             "variable " + std::to_string(i) + ": non-finite node potential");
  }

  std::map<std::pair<VarIndex, VarIndex>, EdgeIndex> seen;
  for (EdgeIndex e = 0; e < model.num_edges(); ++e) {
    const auto [i, j] = model.edge(e);
    const auto name = "edge " + std::to_string(e) + " (" + std::to_string(i) + "," + std::to_string(j) + ")";
    if (i >= n || j >= n) {
      report(Kind::edge_out_of_range, e, name + ": variable index out of range");
      continue;
    }
    if (i == j) report(Kind::self_loop, e, name + ": self-loop");
    else if (auto [it, fresh] = seen.emplace(std::pair{i, j}, e); !fresh)
      report(Kind::duplicate_edge, e, name + ": duplicates edge " + std::to_string(it->second));

    const auto& t = model.edge_potential(e);
    if (t.rows != model.cardinality(i) || t.cols != model.cardinality(j) ||
        t.values.size() != t.rows * t.cols)
      report(Kind::edge_shape_mismatch, e,
             name + ": table shape " + std::to_string(t.rows) + "x" + std::to_string(t.cols) +
                 ", expected " + std::to_string(model.cardinality(i)) + "x" +
                 std::to_string(model.cardinality(j)));
    if (!all_finite(t.values)) report(Kind::non_finite_edge_potential, e, name + ": non-finite potential");
  }
  return out;
}

PairwiseModel add_zero_chord(const PairwiseModel& model, VarIndex i, VarIndex j) {
  if (i == j) throw ModelError("chord endpoints must differ");
  if (i >= model.num_vars() || j >= model.num_vars()) throw ModelError("chord endpoint out of range");
  if (model.has_edge(i, j))
    throw ModelError("duplicate edge (" + std::to_string(i) + "," + std::to_string(j) + ")");
  if (i > j) std::swap(i, j);

  PairwiseModel out = model;
  out.edges_.push_back({i, j});
  out.edge_potentials_.emplace_back(model.cardinality(i), model.cardinality(j));
  const EdgeIndex e = out.edges_.size() - 1;
  out.edge_lookup_.emplace(std::pair{i, j}, e);
  out.adjacency_[i].push_back(e);
  out.adjacency_[j].push_back(e);
  return out;
}

}  // namespace mplp
