#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace landsig::app {

/// Runs one `landsig` subcommand. `args` excludes the program name. Errors
/// are reported on `err` as "error: <Code>: <message>" with a nonzero return.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace landsig::app
