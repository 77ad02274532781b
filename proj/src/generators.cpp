#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mplp/instance_io.hpp"
#include "mplp/rng.hpp"

namespace mplp {

const char* to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::tree: return "tree";
    case GeneratorKind::grid_potts: return "grid_potts";
    case GeneratorKind::spin_glass_grid: return "spin_glass_grid";
    case GeneratorKind::random_complete: return "random_complete";
  }
  return "?";
}

GeneratorKind parse_generator_kind(std::string_view name) {
  for (auto k : {GeneratorKind::tree, GeneratorKind::grid_potts, GeneratorKind::spin_glass_grid,
                 GeneratorKind::random_complete})
    if (name == to_string(k)) return k;
  throw std::invalid_argument("unknown generator kind '" + std::string(name) + "'");
}

namespace {

void check_spec(const GeneratorSpec& s) {
  const bool grid = s.kind == GeneratorKind::grid_potts || s.kind == GeneratorKind::spin_glass_grid;
  if (grid && (s.rows == 0 || s.cols == 0)) throw std::invalid_argument("grid generators need rows and cols > 0");
  if (!grid && s.n == 0) throw std::invalid_argument("generator needs n > 0");
  if (s.states < 2) throw std::invalid_argument("states must be at least 2");
  if (s.states_max != 0 && s.states_max < s.states) throw std::invalid_argument("states_max must be >= states");
  for (const auto& r : {s.coupling, s.field})
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi)
      throw std::invalid_argument("ranges must be finite with lo <= hi");
}

std::vector<std::pair<VarIndex, VarIndex>> random_tree_edges(std::size_t n, Rng& rng) {
  std::vector<std::pair<VarIndex, VarIndex>> edges;
  if (n < 2) return edges;
  if (n == 2) return {{0, 1}};

  // Decode a uniformly random Prüfer sequence.
  std::vector<VarIndex> code(n - 2);
  for (auto& c : code) c = static_cast<VarIndex>(rng.index(n));
  std::vector<std::size_t> degree(n, 1);
  for (auto c : code) ++degree[c];
  for (auto c : code) {
    VarIndex leaf = 0;
    while (degree[leaf] != 1) ++leaf;
    edges.emplace_back(std::min(leaf, c), std::max(leaf, c));
    --degree[leaf];
    --degree[c];
  }
  VarIndex u = n, w = n;
  for (VarIndex v = 0; v < n; ++v)
    if (degree[v] == 1) (u == n ? u : w) = v;
  edges.emplace_back(u, w);
  std::sort(edges.begin(), edges.end());
  return edges;
}

std::vector<std::pair<VarIndex, VarIndex>> lattice_edges(std::size_t rows, std::size_t cols) {
  std::vector<std::pair<VarIndex, VarIndex>> edges;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const VarIndex v = r * cols + c;
      if (c + 1 < cols) edges.emplace_back(v, v + 1);
      if (r + 1 < rows) edges.emplace_back(v, v + cols);
    }
  return edges;
}

}  // namespace

PairwiseModel generate(const GeneratorSpec& spec) {
  check_spec(spec);
  Rng rng(spec.seed);

  const bool grid = spec.kind == GeneratorKind::grid_potts || spec.kind == GeneratorKind::spin_glass_grid;
  const std::size_t n = grid ? spec.rows * spec.cols : spec.n;

  ModelParts parts;
  switch (spec.kind) {
    case GeneratorKind::tree: parts.edges = random_tree_edges(n, rng); break;
    case GeneratorKind::grid_potts:
    case GeneratorKind::spin_glass_grid: parts.edges = lattice_edges(spec.rows, spec.cols); break;
    case GeneratorKind::random_complete:
      for (VarIndex i = 0; i < n; ++i)
        for (VarIndex j = i + 1; j < n; ++j) parts.edges.emplace_back(i, j);
      break;
  }

  for (VarIndex i = 0; i < n; ++i) {
    std::size_t k = spec.states;
    if (spec.states_max > spec.states) k += static_cast<std::size_t>(rng.index(spec.states_max - spec.states + 1));
    parts.cardinalities.push_back(k);
  }
  for (VarIndex i = 0; i < n; ++i) {
    std::vector<double> pot(parts.cardinalities[i]);
    for (auto& v : pot) v = rng.uniform(spec.field.lo, spec.field.hi);
    parts.node_potentials.push_back(std::move(pot));
  }

  for (const auto& [i, j] : parts.edges) {
    const auto ki = parts.cardinalities[i];
    const auto kj = parts.cardinalities[j];
    Table t(ki, kj);
    switch (spec.kind) {
      case GeneratorKind::tree:
      case GeneratorKind::random_complete:
        for (auto& v : t.values) v = rng.uniform(spec.coupling.lo, spec.coupling.hi);
        break;
      case GeneratorKind::grid_potts: {
        const double w = rng.uniform(spec.coupling.lo, spec.coupling.hi);
        for (std::size_t x = 0; x < std::min(ki, kj); ++x) t(x, x) = w;
        break;
      }
      case GeneratorKind::spin_glass_grid: {
        double w = rng.uniform(spec.coupling.lo, spec.coupling.hi);
        if (rng.coin()) w = -w;
        if (ki == 2 && kj == 2) {
          t = Table(2, 2, {w, -w, -w, w});
        } else {
          for (std::size_t x = 0; x < std::min(ki, kj); ++x) t(x, x) = w;
        }
        break;
      }
    }
    parts.edge_potentials.push_back(std::move(t));
  }
  return PairwiseModel::checked(std::move(parts));
}

}  // namespace mplp
