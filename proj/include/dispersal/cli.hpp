#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dispersal {

// Command-line front end. `args` excludes the program name. Subcommands:
//   simulate      sample clouds, write CSV + JSON sidecar
//   estimate      read clouds, print one estimate row
//   mc-sweep      Monte Carlo sweep -> results CSV (+ SVG when requested)
//   rates         tabulate rate_fn over an (s, n, sigma) grid
//   moment-check  analytic vs Monte Carlo cross-moments
// JSON config files (--config) mirror the flags one-to-one; explicit flags
// win. Every run prints the effective seed on `err`. Exit codes: 0 success,
// 2 validation error, 3 runtime error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace dispersal
