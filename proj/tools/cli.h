#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uavsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Commands: train, eval, gridsearch, bench-speedup, export-maps.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uavsim::cli
