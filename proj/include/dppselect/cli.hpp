#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dppselect {

/// Entry point of the `dppselect` tool. Subcommands: select, oracle, synth, kernel.
/// Returns 0 on success, 1 on any library error, 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dppselect
