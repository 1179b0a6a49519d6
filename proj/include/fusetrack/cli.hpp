#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fusetrack::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;    // bad flags, bad config, missing input file
inline constexpr int kExitRuntime = 3;  // malformed data or failures while running

// Entry point shared by the `fusetrack` binary and the tests. args[0] is the
// program name. Log verbosity comes from the FUSETRACK_LOG environment
// variable (trace, debug, info, warn, error, off; default warn).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fusetrack::cli
