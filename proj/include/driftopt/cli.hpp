#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace driftopt::cli {

/// Entry point of the `driftopt` command line tool. Subcommands: run, replay,
/// report, dump-chunks. Returns the process exit status; diagnostics go to
/// `err` as a single line.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace driftopt::cli
