#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vapt::cli {

/// Entry point behind the vapt binary. args excludes the program name.
/// Returns one of the ExitCode values.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace vapt::cli
