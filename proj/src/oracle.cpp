#include "mplp/oracle.hpp"

#include <limits>
#include <string>
#include <vector>

namespace mplp {

namespace {

constexpr double kTieTolerance = 1e-12;

// Enumerates every assignment in lexicographic order (last variable fastest),
// keeping prefix sums so that each step only recomputes the variables that
// changed. contrib(v) = θ_v(x_v) + Σ_{u<v, uv∈E} θ_uv(x_u, x_v).
class Enumerator {
public:
  explicit Enumerator(const PairwiseModel& model) : model_(model), n_(model.num_vars()) {
    lower_edges_.resize(n_);
    for (EdgeIndex e = 0; e < model.num_edges(); ++e) lower_edges_[model.edge(e).j].push_back(e);
    x_.assign(n_, 0);
    prefix_.assign(n_, 0.0);
    recompute_from(0);
  }

  double energy() const { return n_ == 0 ? 0.0 : prefix_[n_ - 1]; }
  const std::vector<State>& states() const { return x_; }

  bool advance() {
    std::size_t v = n_;
    while (v > 0) {
      --v;
      if (++x_[v] < model_.cardinality(v)) {
        recompute_from(v);
        return true;
      }
      x_[v] = 0;
    }
    return false;
  }

private:
  void recompute_from(std::size_t v) {
    for (; v < n_; ++v) {
      double c = model_.node_potential(v)[x_[v]];
      for (EdgeIndex e : lower_edges_[v]) c += model_.edge_potential(e)(x_[model_.edge(e).i], x_[v]);
      prefix_[v] = (v == 0 ? 0.0 : prefix_[v - 1]) + c;
    }
  }

  const PairwiseModel& model_;
  std::size_t n_;
  std::vector<std::vector<EdgeIndex>> lower_edges_;
  std::vector<State> x_;
  std::vector<double> prefix_;
};

}  // namespace

OracleResult brute_force_map(const PairwiseModel& model, std::size_t limit) {
  if (model.state_space_size_capped(limit) > limit)
    throw StateSpaceTooLarge("state space of " + std::to_string(model.num_vars()) +
                             " variables exceeds the enumeration limit of " + std::to_string(limit));
  if (auto diags = validate(model); !diags.empty()) throw ModelError("invalid model: " + diags.front().message);

  double best = -std::numeric_limits<double>::infinity();
  {
    Enumerator it(model);
    do best = std::max(best, it.energy());
    while (it.advance());
  }

  OracleResult r;
  Enumerator it(model);
  do {
    if (it.energy() >= best - kTieTolerance) {
      if (r.optima == 0) r.best.states = it.states();
      ++r.optima;
    }
  } while (it.advance());
  r.energy = evaluate(model, r.best);
  return r;
}

}  // namespace mplp
