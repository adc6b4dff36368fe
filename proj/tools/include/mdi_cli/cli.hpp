#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mdi::cli {

/// Runs one `mdi` command. `args` excludes the program name. Returns the
/// process exit status; failures print a single "error: ..." line to `err`
/// and leave no output files behind.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mdi::cli
