#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gvnr::cli {

/// Exit codes, one per error category.
enum ExitCode : int {
    ok = 0,
    usage_error = 2,    // unknown subcommand or flag, missing required flag
    type_error = 3,     // flag value of the wrong type
    domain_error = 4,   // value outside its allowed range
    missing_file = 5,   // input path does not exist
    input_error = 6,    // malformed input file, unwritable output
    training_error = 7, // divergence
};

/// Runs the command line `args` (args[0] is the program name). Reports go to
/// `out`, diagnostics and progress to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "0.1,0.2", "0.1..0.5" (step 0.1) or "0.1..0.9:0.2".
std::vector<double> parse_ratio_list(const std::string& text);

}  // namespace gvnr::cli
