#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mplp/rng.hpp"

#ifndef MPLP_FIXTURE_DIR
#error "MPLP_FIXTURE_DIR must be defined"
#endif

namespace mplp::test {

namespace {

Table antiferro() { return Table(2, 2, {0, 1, 1, 0}); }

}  // namespace

PairwiseModel chain2() {
  return PairwiseModel::checked({{2, 2}, {{0, 1}, {0, 2}}, {{0, 1}}, {Table(2, 2, {0, 0, 0, 3})}});
}

PairwiseModel antiferro_triangle() {
  return PairwiseModel::checked(
      {{2, 2, 2}, {{0, 0}, {0, 0}, {0, 0}}, {{0, 1}, {0, 2}, {1, 2}}, {antiferro(), antiferro(), antiferro()}});
}

PairwiseModel frustrated_cycle4() {
  return PairwiseModel::checked({{2, 2, 2, 2},
                                 {{0, 0}, {0, 0}, {0, 0}, {0, 0}},
                                 {{0, 1}, {1, 2}, {2, 3}, {0, 3}},
                                 {antiferro(), antiferro(), antiferro(), Table(2, 2, {1, 0, 0, 1})}});
}

PairwiseModel random_graph(std::uint64_t seed, std::size_t n, std::size_t k_min, std::size_t k_max, double density) {
  Rng rng(seed);
  ModelParts parts;
  for (std::size_t i = 0; i < n; ++i) parts.cardinalities.push_back(k_min + rng.index(k_max - k_min + 1));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> pot(parts.cardinalities[i]);
    for (auto& v : pot) v = rng.uniform(-1.0, 1.0);
    parts.node_potentials.push_back(pot);
  }
  std::vector<std::vector<bool>> present(n, std::vector<bool>(n, false));
  for (std::size_t v = 1; v < n; ++v) {
    const auto u = static_cast<std::size_t>(rng.index(v));
    present[u][v] = true;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (present[i][j] || rng.uniform(0.0, 1.0) < density) {
        Table t(parts.cardinalities[i], parts.cardinalities[j]);
        for (auto& v : t.values) v = rng.uniform(-1.0, 1.0);
        parts.edges.emplace_back(i, j);
        parts.edge_potentials.push_back(std::move(t));
      }
  return PairwiseModel::checked(std::move(parts));
}

PairwiseModel zeroed(const PairwiseModel& model) {
  ModelParts parts;
  for (VarIndex i = 0; i < model.num_vars(); ++i) {
    parts.cardinalities.push_back(model.cardinality(i));
    parts.node_potentials.emplace_back(model.cardinality(i), 0.0);
  }
  for (EdgeIndex e = 0; e < model.num_edges(); ++e) {
    const auto& edge = model.edge(e);
    parts.edges.emplace_back(edge.i, edge.j);
    parts.edge_potentials.emplace_back(model.cardinality(edge.i), model.cardinality(edge.j));
  }
  return PairwiseModel::checked(std::move(parts));
}

ExactResult grid_map(const PairwiseModel& model, std::size_t rows, std::size_t cols) {
  if (model.num_vars() != rows * cols) throw std::invalid_argument("grid_map: variable count mismatch");
  std::size_t lattice = 0;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const auto v = r * cols + c;
      if (c + 1 < cols && model.has_edge(v, v + 1)) ++lattice;
      if (r + 1 < rows && model.has_edge(v, v + cols)) ++lattice;
    }
  if (lattice != model.num_edges()) throw std::invalid_argument("grid_map: model has non-lattice edges");

  // Row configurations enumerated mixed-radix; decode() expands an index.
  auto row_size = [&](std::size_t r) {
    std::size_t s = 1;
    for (std::size_t c = 0; c < cols; ++c) s *= model.cardinality(r * cols + c);
    return s;
  };
  auto decode = [&](std::size_t r, std::size_t idx) {
    std::vector<State> x(cols);
    for (std::size_t c = 0; c < cols; ++c) {
      const auto k = model.cardinality(r * cols + c);
      x[c] = idx % k;
      idx /= k;
    }
    return x;
  };
  auto row_score = [&](std::size_t r, const std::vector<State>& x) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      const auto v = r * cols + c;
      s += model.node_potential(v)[x[c]];
      if (c + 1 < cols)
        if (auto e = model.find_edge(v, v + 1)) s += model.edge_value(*e, v, x[c], x[c + 1]);
    }
    return s;
  };
  auto between = [&](std::size_t r, const std::vector<State>& upper, const std::vector<State>& lower) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      const auto v = r * cols + c;
      if (auto e = model.find_edge(v, v + cols)) s += model.edge_value(*e, v, upper[c], lower[c]);
    }
    return s;
  };

  std::vector<std::vector<double>> value(rows);
  std::vector<std::vector<std::size_t>> back(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto size = row_size(r);
    value[r].assign(size, -std::numeric_limits<double>::infinity());
    back[r].assign(size, 0);
    for (std::size_t s = 0; s < size; ++s) {
      const auto x = decode(r, s);
      const double own = row_score(r, x);
      if (r == 0) {
        value[r][s] = own;
        continue;
      }
      for (std::size_t p = 0; p < value[r - 1].size(); ++p) {
        const double v = value[r - 1][p] + between(r - 1, decode(r - 1, p), x) + own;
        if (v > value[r][s]) {
          value[r][s] = v;
          back[r][s] = p;
        }
      }
    }
  }

  ExactResult out{-std::numeric_limits<double>::infinity(), {}};
  std::size_t s = 0;
  for (std::size_t k = 0; k < value[rows - 1].size(); ++k)
    if (value[rows - 1][k] > out.energy) {
      out.energy = value[rows - 1][k];
      s = k;
    }
  out.best.states.assign(rows * cols, 0);
  for (std::size_t r = rows; r-- > 0;) {
    const auto x = decode(r, s);
    for (std::size_t c = 0; c < cols; ++c) out.best.states[r * cols + c] = x[c];
    s = back[r][s];
  }
  return out;
}

ExactResult tree_map(const PairwiseModel& model) {
  const auto n = model.num_vars();
  if (model.num_edges() >= n && n > 0) throw std::invalid_argument("tree_map: model has a cycle");

  // Root each component, order vertices so children come after parents.
  std::vector<std::size_t> parent(n, n), parent_edge(n, 0), order;
  std::vector<bool> seen(n, false);
  for (VarIndex root = 0; root < n; ++root) {
    if (seen[root]) continue;
    seen[root] = true;
    order.push_back(root);
    for (std::size_t k = order.size() - 1; k < order.size(); ++k) {
      const auto v = order[k];
      for (EdgeIndex e : model.incident_edges(v)) {
        const auto w = model.edge(e).i == v ? model.edge(e).j : model.edge(e).i;
        if (w == parent[v]) continue;
        if (seen[w]) throw std::invalid_argument("tree_map: model has a cycle");
        seen[w] = true;
        parent[w] = v;
        parent_edge[w] = e;
        order.push_back(w);
      }
    }
  }

  // up[v](x_v): best value of v's subtree given x_v.
  std::vector<std::vector<double>> up(n);
  for (VarIndex v = 0; v < n; ++v) up[v].assign(model.node_potential(v).begin(), model.node_potential(v).end());
  std::vector<std::vector<State>> choice(n);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto v = *it;
    const auto p = parent[v];
    if (p == n) continue;
    choice[v].assign(model.cardinality(p), 0);
    for (State xp = 0; xp < model.cardinality(p); ++xp) {
      double best = -std::numeric_limits<double>::infinity();
      for (State xv = 0; xv < model.cardinality(v); ++xv) {
        const double val = up[v][xv] + model.edge_value(parent_edge[v], p, xp, xv);
        if (val > best) {
          best = val;
          choice[v][xp] = xv;
        }
      }
      up[p][xp] += best;
    }
  }

  ExactResult out{0.0, {}};
  out.best.states.assign(n, 0);
  for (auto v : order) {
    if (parent[v] == n) {
      const auto& u = up[v];
      const auto arg = static_cast<State>(std::max_element(u.begin(), u.end()) - u.begin());
      out.best.states[v] = arg;
      out.energy += u[arg];
    } else {
      out.best.states[v] = choice[v][out.best.states[parent[v]]];
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::string fixture_path(const std::string& name) { return std::string(MPLP_FIXTURE_DIR) + "/" + name; }

}  // namespace mplp::test
