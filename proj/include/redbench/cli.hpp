#ifndef REDBENCH_CLI_HPP
#define REDBENCH_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace redbench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Runs the workbench command line. `args` excludes the program name.
/// Subcommands: sim, decode, fluid, compare.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace redbench

#endif  // REDBENCH_CLI_HPP
