#pragma once

#include <ostream>
#include <string>

namespace shapedesc {

struct CheckOptions {
    bool perturb_stiffness = false;  // negative-control hook: corrupt one assembly
    unsigned seed = 0;
};

/// Runs the built-in verification suite (patch tests, manufactured solution,
/// stencil exactness, derivative consistency), printing one PASS/FAIL line per
/// check. Returns true iff all checks pass.
bool run_checks(std::ostream& out, const CheckOptions& options = {});

}  // namespace shapedesc
