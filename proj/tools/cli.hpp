#ifndef MPLP_TOOLS_CLI_HPP
#define MPLP_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "mplp/pursuit.hpp"

namespace mplp::cli {

inline constexpr int kExitCertified = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitGap = 2;

inline constexpr const char* kTraceHeader = "event,pass,dual,decoded,clusters,d_c,ms";

/// Runs `mplp <args...>` (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string format_trace_csv(const SolveTrace& trace);

}  // namespace mplp::cli

#endif
