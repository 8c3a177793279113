#pragma once

#include <iosfwd>

namespace anosov {

inline constexpr const char* kToolVersion = "1.0.0";
/// Environment variable naming a JSON config file applied before flags.
inline constexpr const char* kConfigEnv = "ANOSOV_CERT_CONFIG";

enum ExitCode : int { kExitPass = 0, kExitCertifiedFail = 1, kExitError = 2 };

/// Entry point of the anosov-cert tool. Subcommands: certify, power-search,
/// limit-set, estimate-c, jsj-validate, register.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace anosov
