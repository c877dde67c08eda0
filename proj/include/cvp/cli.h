#pragma once

namespace cvp {

/// Command-line entry point (solve, compile, validate, gen, bench).
/// Returns 0 on success/solved, 1 on unsolved or invalid input
/// semantics, 2 on usage or parse errors.
int cli_main(int argc, const char* const* argv);

}  // namespace cvp
