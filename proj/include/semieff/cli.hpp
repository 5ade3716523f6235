#pragma once

namespace semieff::cli {

/// Entry point of the semieff tool. Returns 0 on success, 1 on a configuration
/// error and 2 when an asserted invariant fails.
int run(int argc, char** argv);

}  // namespace semieff::cli
