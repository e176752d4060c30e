#pragma once

namespace magcomp::cli {

/// Parses argv and runs one subcommand. Returns 0 on success, 1 on usage
/// errors, 2 on data/validation errors, 3 on numerical failures.
int run(int argc, const char* const* argv);

}  // namespace magcomp::cli
