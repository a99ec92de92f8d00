#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mdelta::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitInvalid = 2;

// Runs one subcommand; `args` excludes the program name. Summaries go to
// `out` unless the artifact itself is written to stdout ("-"), in which case
// they go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Reads a config file of `key=value` lines ('#' comments) and splices the
// entries in as `--key=value` after the subcommand path, skipping keys the
// command line sets itself.
std::vector<std::string> apply_config(const std::vector<std::string>& args);

}  // namespace mdelta::cli
