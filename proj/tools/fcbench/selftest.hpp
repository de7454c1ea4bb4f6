#pragma once

#include <ostream>

#include "run.hpp"

namespace fcbench::tool {

// Built-in sanity checks over the payload, executor and statistics pipeline.
// Prints one pass/fail line per check; exits non-zero on any failure.
int cmd_selftest(const RunSettings& settings, std::ostream& log);

}  // namespace fcbench::tool
