#ifndef FERN_TOOLS_CLI_HPP
#define FERN_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace fern::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs one `fern` invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace fern::cli

#endif
