#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace jcoup::cli {

/// Runs one invocation. `args` excludes the program name. Diagnostics go to
/// `err`; data only ever goes to the files named by --output. Returns the
/// process exit code (0 iff the requested artifact was written).
int run(std::vector<std::string> args, std::ostream &err);

/// Merges a flat `key = value` file into `args`: every key becomes
/// `--key value` unless that flag is already present. Lines starting with
/// '#' or ';' are comments. Throws std::runtime_error on malformed lines.
std::vector<std::string> merge_config(std::vector<std::string> args,
                                      const std::string &config_text);

/// Writes via a temporary sibling file and rename, so readers never see a
/// partial file.
void write_atomically(const std::string &path, const std::string &content);

} // namespace jcoup::cli
