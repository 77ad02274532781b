#ifndef MPLP_INSTANCE_IO_HPP
#define MPLP_INSTANCE_IO_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mplp/model.hpp"

namespace mplp {

class ParseError : public std::runtime_error {
public:
  enum class Kind { malformed, shape_mismatch, non_finite, unsupported_scope, duplicate_factor, domain };

  ParseError(Kind kind, std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), kind_(kind), line_(line) {}

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }

private:
  Kind kind_;
  std::size_t line_;
};

// Native text format:
//   MRFLOG 1
//   n
//   k_0 ... k_{n-1}
//   θ_i, one line per variable
//   m
//   per edge: a line `i j`, then k_i lines of k_j values
// Blank lines and lines starting with '#' are ignored. Values are written
// with 17 significant digits so parse(write(m)) == m exactly.
PairwiseModel parse_native(std::string_view text);
std::string write_native(const PairwiseModel& model);

/// %.17g-style text; parses back to the same double.
std::string format_real(double v);

inline constexpr double kDefaultZeroFloor = -1e6;

/// UAI MARKOV network with unary and pairwise factors. Probabilities p map
/// to ln p; p == 0 maps to `zero_floor`.
PairwiseModel parse_uai(std::string_view text, double zero_floor = kDefaultZeroFloor);

/// UAI MARKOV text with every potential exponentiated: one unary factor per
/// variable followed by one pairwise factor per edge.
std::string write_uai(const PairwiseModel& model);

enum class InstanceFormat { native, uai };

/// Reads and parses a file; I/O failures throw std::runtime_error.
PairwiseModel load_model(const std::string& path, InstanceFormat format, double zero_floor = kDefaultZeroFloor);

enum class GeneratorKind { tree, grid_potts, spin_glass_grid, random_complete };

const char* to_string(GeneratorKind k);
GeneratorKind parse_generator_kind(std::string_view name);

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

/// tree and random_complete use `n`; the grid kinds use rows x cols.
/// Each variable gets `states` states, or a uniform draw from
/// [states, states_max] when states_max > states.
///
/// Potentials:
///   tree, random_complete  every edge entry ~ U(coupling)
///   grid_potts             θ_ij(x,y) = w [x == y], w ~ U(coupling)
///   spin_glass_grid        w = ±U(coupling) with a fair random sign;
///                          binary: θ_ij(x,y) = w s_x s_y with s = ±1,
///                          otherwise w [x == y]
/// and node entries ~ U(field) for all kinds.
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::tree;
  std::size_t n = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t states = 2;
  std::size_t states_max = 0;
  Range coupling{0.0, 1.0};
  Range field{-1.0, 1.0};
  std::uint64_t seed = 0;
};

/// Deterministic in the spec; trees are uniform over labelled trees
/// (random Prüfer sequence). Throws std::invalid_argument on a bad spec.
PairwiseModel generate(const GeneratorSpec& spec);

}  // namespace mplp

#endif
