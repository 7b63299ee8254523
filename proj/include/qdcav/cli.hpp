#pragma once

namespace qdcav {

// Entry point behind the qdcav binary. Subcommands: simulate, sweep,
// optimize-re, compare-phonons, validate-config. Returns 0 on success,
// 1 on configuration/usage errors, 2 on numerical failure.
int cli_main(int argc, const char* const* argv);

}  // namespace qdcav
