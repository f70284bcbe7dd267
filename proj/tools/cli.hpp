#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mlrpca::cli {

/// Runs one `mlrpca` invocation. `args` excludes the program name.
/// Returns 0 on success, 1 on a pipeline error, 2 on a flag error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mlrpca::cli
