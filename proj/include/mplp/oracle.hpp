#ifndef MPLP_ORACLE_HPP
#define MPLP_ORACLE_HPP

#include <cstddef>
#include <stdexcept>

#include "mplp/model.hpp"

namespace mplp {

class StateSpaceTooLarge : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct OracleResult {
  Assignment best;
  double energy = 0.0;
  std::size_t optima = 0;  // assignments within 1e-12 of the best energy
};

inline constexpr std::size_t kDefaultOracleLimit = std::size_t{1} << 24;

/// Exact MAP by mixed-radix enumeration (variable 0 least significant).
/// Ties go to the lexicographically smallest assignment.
OracleResult brute_force_map(const PairwiseModel& model, std::size_t limit = kDefaultOracleLimit);

}  // namespace mplp

#endif
