#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ctd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitUsage = 2;

/// Entry point for `ctd_cli run|sweep|metrics|synth`. Returns the process
/// exit status: 0 on success, 1 on I/O failure, 2 on bad configuration.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ctd::cli
