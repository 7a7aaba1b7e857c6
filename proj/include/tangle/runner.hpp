#pragma once

#include "tangle/config.hpp"

namespace tangle {

inline constexpr const char* kVersion = "0.1.0";

// Executes a finalized config: creates the output directory (refusing to
// touch an existing one unless cfg.force), writes the mode's CSV artifacts
// plus a manifest, and prints a one-line machine-readable RESULT summary.
// Returns the process exit code: 0 on success, 1 when an internal check
// fails (fluid property residuals, decay envelope, a lambda with no usable
// replicas), 2 on refusal or I/O failure.
int run(const RunConfig& cfg);

}  // namespace tangle
