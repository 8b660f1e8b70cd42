#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace acd {

// Exit codes of the command-line tool.
inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_runtime = 2;

/*
    Subcommands solve, bench, eso and sampling-check. args excludes the
    program name. Human-readable summaries go to out, diagnostics to err.
*/
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace acd
