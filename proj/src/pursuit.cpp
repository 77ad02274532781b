#include "mplp/pursuit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <sstream>

#include "mplp/rng.hpp"

namespace mplp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<std::vector<VarIndex>> sorted_neighbours(const PairwiseModel& model) {
  std::vector<std::vector<VarIndex>> nb(model.num_vars());
  for (const auto& e : model.edges()) {
    nb[e.i].push_back(e.j);
    nb[e.j].push_back(e.i);
  }
  for (auto& v : nb) std::sort(v.begin(), v.end());
  return nb;
}

// b_e read as a table with rows indexing `first`.
Table oriented(const PairwiseModel& model, Table belief, EdgeIndex e, VarIndex first) {
  return model.edge(e).i == first ? belief : belief.transposed();
}

std::array<VarIndex, 3> sorted_triple(VarIndex a, VarIndex b, VarIndex c) {
  std::array<VarIndex, 3> v{a, b, c};
  std::sort(v.begin(), v.end());
  return v;
}

// Position of the lowest-index vertex; the chord runs from it to the
// opposite vertex.
std::size_t chord_root(const CandidateSquare& sq) {
  return static_cast<std::size_t>(std::min_element(sq.vars.begin(), sq.vars.end()) - sq.vars.begin());
}

std::array<std::array<VarIndex, 3>, 2> square_triplets(const CandidateSquare& sq) {
  const auto p = chord_root(sq);
  const auto& v = sq.vars;
  return {sorted_triple(v[p], v[(p + 1) % 4], v[(p + 2) % 4]), sorted_triple(v[p], v[(p + 2) % 4], v[(p + 3) % 4])};
}

}  // namespace

std::string describe(const Candidate& c) {
  std::ostringstream os;
  if (const auto* t = std::get_if<Cluster>(&c)) {
    os << "triplet " << t->vars[0] << "-" << t->vars[1] << "-" << t->vars[2];
  } else {
    const auto& s = std::get<CandidateSquare>(c);
    os << "square " << s.vars[0] << "-" << s.vars[1] << "-" << s.vars[2] << "-" << s.vars[3];
  }
  return os.str();
}

void check_config(const SolveConfig& c) {
  if (c.initial_pass_cap == 0) throw ConfigError("initial pass cap must be positive");
  if (c.inner_iters == 0) throw ConfigError("inner iterations must be positive");
  if (c.clusters_per_round == 0) throw ConfigError("clusters per round must be positive");
  if (!(c.gap_tolerance > 0.0)) throw ConfigError("gap tolerance must be positive");
  if (!(c.convergence_threshold > 0.0)) throw ConfigError("convergence threshold must be positive");
  if (!(c.gap_tolerance > c.convergence_threshold))
    throw ConfigError("gap tolerance must exceed the convergence threshold");
  if (!(c.score_floor >= 0.0) || !std::isfinite(c.score_floor)) throw ConfigError("score floor must be finite and >= 0");
  if (c.square_budget == 0) throw ConfigError("square budget must be positive");
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::certified: return "certified";
    case SolveStatus::gap_remaining: return "gap-remaining";
    case SolveStatus::budget_exhausted: return "budget-exhausted";
  }
  return "?";
}

const char* to_string(CandidateKind k) {
  switch (k) {
    case CandidateKind::triangles: return "triangles";
    case CandidateKind::squares: return "squares";
    case CandidateKind::both: return "both";
  }
  return "?";
}

const char* to_string(TraceEvent::Kind k) {
  switch (k) {
    case TraceEvent::Kind::pass: return "pass";
    case TraceEvent::Kind::cluster_added: return "cluster-added";
    case TraceEvent::Kind::decoded: return "decoded";
  }
  return "?";
}

std::vector<Cluster> enumerate_triangles(const PairwiseModel& model) {
  const auto nb = sorted_neighbours(model);
  std::vector<Cluster> out;
  for (VarIndex a = 0; a < model.num_vars(); ++a)
    for (VarIndex b : nb[a]) {
      if (b <= a) continue;
      for (VarIndex c : nb[a]) {
        if (c <= b) continue;
        if (std::binary_search(nb[b].begin(), nb[b].end(), c)) out.push_back(make_triplet(model, a, b, c));
      }
    }
  return out;
}

std::vector<CandidateSquare> enumerate_squares(const PairwiseModel& model, std::size_t budget) {
  const auto nb = sorted_neighbours(model);
  auto adjacent = [&](VarIndex u, VarIndex v) { return std::binary_search(nb[u].begin(), nb[u].end(), v); };

  // Cycle a-b-c-d-a with a the minimum vertex and b < d; c is opposite a.
  std::vector<CandidateSquare> out;
  for (VarIndex a = 0; a < model.num_vars(); ++a) {
    for (VarIndex b : nb[a]) {
      if (b <= a) continue;
      for (VarIndex c : nb[b]) {
        if (c <= a || adjacent(a, c)) continue;
        for (VarIndex d : nb[c]) {
          if (d <= b || !adjacent(a, d) || adjacent(b, d)) continue;
          if (out.size() >= budget) return out;
          CandidateSquare sq;
          sq.vars = {a, b, c, d};
          for (std::size_t s = 0; s < 4; ++s) sq.cycle_edges[s] = *model.find_edge(sq.vars[s], sq.vars[(s + 1) % 4]);
          out.push_back(sq);
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const CandidateSquare& x, const CandidateSquare& y) { return x.vars < y.vars; });
  return out;
}

double score_cluster(const MessageState& state, const PairwiseModel& model, const Cluster& c) {
  const std::array<Table, 3> b{edge_belief(state, model, c.edge_ids[0], c), edge_belief(state, model, c.edge_ids[1], c),
                               edge_belief(state, model, c.edge_ids[2], c)};
  const auto ka = model.cardinality(c.vars[0]);
  const auto kb = model.cardinality(c.vars[1]);
  const auto kc = model.cardinality(c.vars[2]);

  double joint = kNegInf;
  for (std::size_t xa = 0; xa < ka; ++xa)
    for (std::size_t xb = 0; xb < kb; ++xb)
      for (std::size_t xc = 0; xc < kc; ++xc) joint = std::max(joint, b[0](xa, xb) + b[1](xa, xc) + b[2](xb, xc));
  const double independent = b[0].max() + b[1].max() + b[2].max();
  return std::max(0.0, independent - joint);
}

double score_cluster(const MessageState& state, const PairwiseModel& model, const CandidateSquare& sq) {
  std::array<Table, 4> b;
  double independent = 0.0;
  for (std::size_t s = 0; s < 4; ++s) {
    b[s] = oriented(model, edge_belief(state, model, sq.cycle_edges[s]), sq.cycle_edges[s], sq.vars[s]);
    independent += b[s].max();
  }
  std::array<std::size_t, 4> k{};
  for (std::size_t s = 0; s < 4; ++s) k[s] = model.cardinality(sq.vars[s]);

  double joint = kNegInf;
  for (std::size_t x0 = 0; x0 < k[0]; ++x0)
    for (std::size_t x1 = 0; x1 < k[1]; ++x1) {
      const double v01 = b[0](x0, x1);
      for (std::size_t x2 = 0; x2 < k[2]; ++x2) {
        const double v012 = v01 + b[1](x1, x2);
        for (std::size_t x3 = 0; x3 < k[3]; ++x3) joint = std::max(joint, v012 + b[2](x2, x3) + b[3](x3, x0));
      }
    }
  return std::max(0.0, independent - joint);
}

double score_cluster(const MessageState& state, const PairwiseModel& model, const Candidate& c) {
  return std::visit([&](const auto& x) { return score_cluster(state, model, x); }, c);
}

bool is_registered(const MessageState& state, const PairwiseModel& model, const Candidate& c) {
  (void)model;
  if (const auto* t = std::get_if<Cluster>(&c)) return state.find_cluster(*t).has_value();
  for (const auto& tri : square_triplets(std::get<CandidateSquare>(c)))
    if (!state.find_cluster(tri)) return false;
  return true;
}

void add_chord(MessageState& state, PairwiseModel& model, VarIndex i, VarIndex j) {
  model = add_zero_chord(model, i, j);
  state.sync_edges(model);
}

void add_cluster(MessageState& state, PairwiseModel& model, const Candidate& c) {
  if (is_registered(state, model, c)) throw ClusterError(describe(c) + " is already registered");
  if (const auto* t = std::get_if<Cluster>(&c)) {
    state.register_cluster(model, *t);
    return;
  }
  const auto& sq = std::get<CandidateSquare>(c);
  const auto p = chord_root(sq);
  const VarIndex u = sq.vars[p], w = sq.vars[(p + 2) % 4];
  if (!model.has_edge(u, w)) add_chord(state, model, u, w);
  for (const auto& tri : square_triplets(sq))
    if (!state.find_cluster(tri)) state.register_cluster(model, make_triplet(model, tri[0], tri[1], tri[2]));
}

namespace {

struct Scored {
  Candidate candidate;
  double score;
};

using Selector = std::function<std::vector<Scored>(std::vector<Scored>&&, std::size_t)>;

std::vector<Candidate> open_candidates(const MessageState& state, const PairwiseModel& model, const SolveConfig& config) {
  std::vector<Candidate> out;
  if (config.candidate_kind != CandidateKind::squares)
    for (auto& t : enumerate_triangles(model))
      if (!state.find_cluster(t)) out.emplace_back(t);
  if (config.candidate_kind != CandidateKind::triangles)
    for (auto& s : enumerate_squares(model, config.square_budget))
      if (!is_registered(state, model, s)) out.emplace_back(s);
  return out;
}

SolveResult run_solve(const PairwiseModel& input, const SolveConfig& config, const Selector& select) {
  if (auto diags = validate(input); !diags.empty()) throw ModelError("invalid model: " + diags.front().message);
  check_config(config);

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed_ms = [&] { return std::chrono::duration<double, std::milli>(Clock::now() - start).count(); };

  SolveResult r;
  r.final_model = input;
  PairwiseModel& model = r.final_model;
  MessageState& state = r.final_state;
  state = init_messages(model);
  auto& events = r.trace.events;

  bool have_best = false;
  auto certified = [&] { return have_best && r.dual - r.decoded_energy <= config.gap_tolerance; };

  double last_decrease = std::numeric_limits<double>::infinity();
  auto consider = [&](Assignment a) {
    const double energy = evaluate(model, a);
    if (!have_best || energy > r.decoded_energy) {
      r.assignment = std::move(a);
      r.decoded_energy = energy;
      have_best = true;
    }
  };
  auto pass = [&] {
    run_pass(state, model);
    const double before = r.dual;
    r.dual = dual_objective(state, model);
    if (state.pass_count() > 1) last_decrease = before - r.dual;
    consider(decode(state, model));
    consider(decode_resolving_ties(state, model));
    events.push_back({TraceEvent::Kind::pass, state.pass_count(), r.dual, r.decoded_energy,
                      state.clusters().size(), std::nullopt, 0.0, elapsed_ms()});
  };

  // Edge-only phase: stop on certificate, on a pass that barely moves the
  // dual, or at the cap.
  for (std::size_t p = 0; p < config.initial_pass_cap; ++p) {
    pass();
    if (certified() || last_decrease < config.convergence_threshold) break;
  }

  while (true) {
    events.push_back({TraceEvent::Kind::decoded, state.pass_count(), r.dual, r.decoded_energy,
                      state.clusters().size(), std::nullopt, 0.0, elapsed_ms()});
    if (certified()) {
      r.status = SolveStatus::certified;
      break;
    }
    if (r.rounds >= config.max_rounds) {
      r.status = SolveStatus::budget_exhausted;
      break;
    }

    std::vector<Scored> scored;
    for (auto& c : open_candidates(state, model, config)) {
      const double d = score_cluster(state, model, c);
      scored.push_back({std::move(c), d});
    }
    auto chosen = select(std::move(scored), config.clusters_per_round);
    std::size_t added_this_round = 0;
    for (auto& [cand, d] : chosen) {
      if (is_registered(state, model, cand)) continue;
      add_cluster(state, model, cand);
      ++added_this_round;
      r.added.push_back(cand);
      r.added_scores.push_back(d);
      events.push_back({TraceEvent::Kind::cluster_added, state.pass_count(), r.dual, r.decoded_energy,
                        state.clusters().size(), cand, d, elapsed_ms()});
    }
    // Nothing left to add: keep passing until the dual itself settles.
    if (added_this_round == 0 && last_decrease < config.convergence_threshold) {
      r.status = SolveStatus::gap_remaining;
      break;
    }
    ++r.rounds;
    for (std::size_t t = 0; t < config.inner_iters; ++t) {
      pass();
      if (certified()) break;
    }
  }

  r.passes = state.pass_count();
  r.ms = elapsed_ms();
  return r;
}

}  // namespace

SolveResult solve(const PairwiseModel& model, const SolveConfig& config) {
  const double floor = config.score_floor;
  return run_solve(model, config, [floor](std::vector<Scored>&& all, std::size_t k) {
    std::erase_if(all, [floor](const Scored& s) { return !(s.score > floor); });
    std::stable_sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });
    if (all.size() > k) all.resize(k);
    return std::move(all);
  });
}

SolveResult solve_random_schedule(const PairwiseModel& model, const SolveConfig& config, std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  return run_solve(model, config, [rng](std::vector<Scored>&& all, std::size_t k) {
    // Partial Fisher-Yates over enumeration order.
    const std::size_t take = std::min(k, all.size());
    for (std::size_t s = 0; s < take; ++s) {
      const std::size_t pick = s + static_cast<std::size_t>(rng->index(all.size() - s));
      std::swap(all[s], all[pick]);
    }
    all.resize(take);
    return std::move(all);
  });
}

}  // namespace mplp
