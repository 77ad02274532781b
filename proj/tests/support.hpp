#ifndef MPLP_TESTS_SUPPORT_HPP
#define MPLP_TESTS_SUPPORT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mplp/model.hpp"

namespace mplp::test {

/// θ_1=[0,1], θ_2=[0,2], θ_12=[[0,0],[0,3]].
PairwiseModel chain2();

/// Binary triangle, θ_i = 0, θ_ij = [[0,1],[1,0]].
PairwiseModel antiferro_triangle();

/// 4-cycle 0-1-2-3-0, three [[0,1],[1,0]] edges and one [[1,0],[0,1]].
PairwiseModel frustrated_cycle4();

/// Connected random graph on n variables: a random spanning tree plus each
/// other pair with probability `density`. Entries uniform in [-1, 1].
PairwiseModel random_graph(std::uint64_t seed, std::size_t n, std::size_t k_min, std::size_t k_max, double density);

/// All-zero potentials over the same structure.
PairwiseModel zeroed(const PairwiseModel& model);

struct ExactResult {
  double energy;
  Assignment best;
};

/// Exact MAP of a rows x cols 4-connected lattice (variable r*cols + c) by
/// dynamic programming over row configurations. Independent of the
/// enumeration oracle; throws if the model has non-lattice edges.
ExactResult grid_map(const PairwiseModel& model, std::size_t rows, std::size_t cols);

/// Exact MAP of a forest by max-product dynamic programming.
ExactResult tree_map(const PairwiseModel& model);

std::string read_file(const std::string& path);
std::string fixture_path(const std::string& name);

}  // namespace mplp::test

#endif
