#ifndef TNC_CLI_HPP
#define TNC_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace tnc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitCap = 3;

/// Version stamped into every --json document as {"format": "tnc", "version": N}.
inline constexpr int kOutputVersion = 1;

/// Runs one command (args exclude the program name). Subcommands: plan, cost,
/// convert, contract, validate, random, schroedinger. Returns the exit code:
/// 0 success, 2 input error, 3 resource cap, 1 anything else.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tnc

#endif
