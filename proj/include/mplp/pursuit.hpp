#ifndef MPLP_PURSUIT_HPP
#define MPLP_PURSUIT_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mplp/messages.hpp"
#include "mplp/model.hpp"

namespace mplp {

class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Chordless 4-cycle; vars[0] is the lowest index, vars in cycle order, and
/// cycle_edges[s] joins vars[s] and vars[(s+1)%4].
struct CandidateSquare {
  std::array<VarIndex, 4> vars{};
  std::array<EdgeIndex, 4> cycle_edges{};
  friend bool operator==(const CandidateSquare&, const CandidateSquare&) = default;
};

using Candidate = std::variant<Cluster, CandidateSquare>;

std::string describe(const Candidate& c);

enum class CandidateKind { triangles, squares, both };

struct SolveConfig {
  std::size_t initial_pass_cap = 1000;
  std::size_t inner_iters = 20;
  std::size_t clusters_per_round = 5;
  double gap_tolerance = 1e-4;
  double convergence_threshold = 2e-5;
  std::size_t max_rounds = 1000;  // 0 runs the edge-only phase alone
  CandidateKind candidate_kind = CandidateKind::both;
  double score_floor = 1e-8;
  std::size_t square_budget = 1'000'000;
};

/// Throws ConfigError on the first invalid field.
void check_config(const SolveConfig& config);

enum class SolveStatus { certified, gap_remaining, budget_exhausted };

const char* to_string(SolveStatus s);
const char* to_string(CandidateKind k);

struct TraceEvent {
  enum class Kind { pass, cluster_added, decoded };
  Kind kind = Kind::pass;
  std::size_t pass = 0;
  double dual = 0.0;
  double decoded = 0.0;          // best decoded energy so far
  std::size_t clusters = 0;      // registered triplet clusters after the event
  std::optional<Candidate> added;
  double d_c = 0.0;
  double ms = 0.0;
};

const char* to_string(TraceEvent::Kind k);

struct SolveTrace {
  std::vector<TraceEvent> events;
};

struct SolveResult {
  SolveStatus status = SolveStatus::gap_remaining;
  Assignment assignment;        // best decoded assignment seen
  double decoded_energy = 0.0;
  double dual = 0.0;
  std::vector<Candidate> added;  // in addition order
  std::vector<double> added_scores;
  std::size_t passes = 0;
  std::size_t rounds = 0;
  double ms = 0.0;
  SolveTrace trace;
  PairwiseModel final_model;  // input plus any zero chords
  MessageState final_state;

  double gap() const { return dual - decoded_energy; }
};

/// Every variable triple whose three edges exist, sorted by triple.
std::vector<Cluster> enumerate_triangles(const PairwiseModel& model);

/// Chordless 4-cycles sorted by (vars[0], vars[1], vars[2]), at most
/// `budget` of them.
std::vector<CandidateSquare> enumerate_squares(const PairwiseModel& model,
                                               std::size_t budget = std::numeric_limits<std::size_t>::max());

/// Guaranteed dual decrease d(c): Σ_e max b_e − max_{x_c} Σ_e b_e, with the
/// candidate's own messages excluded from b_e. Non-negative.
double score_cluster(const MessageState& state, const PairwiseModel& model, const Cluster& c);
double score_cluster(const MessageState& state, const PairwiseModel& model, const CandidateSquare& sq);
double score_cluster(const MessageState& state, const PairwiseModel& model, const Candidate& c);

/// True when every triplet the candidate would register already is.
bool is_registered(const MessageState& state, const PairwiseModel& model, const Candidate& c);

/// Adds a zero-potential edge to the model and zero messages for it.
void add_chord(MessageState& state, PairwiseModel& model, VarIndex i, VarIndex j);

/// Registers the candidate with zero messages. A square is triangulated
/// through its lowest-index vertex, inserting the chord if needed. Leaves
/// dual_objective unchanged. Throws ClusterError if already registered.
void add_cluster(MessageState& state, PairwiseModel& model, const Candidate& c);

/// Edge-only MPLP, then rounds of scoring and adding the top candidates.
SolveResult solve(const PairwiseModel& model, const SolveConfig& config);

/// As solve, but each round adds uniformly random unregistered candidates.
SolveResult solve_random_schedule(const PairwiseModel& model, const SolveConfig& config, std::uint64_t seed);

}  // namespace mplp

#endif
