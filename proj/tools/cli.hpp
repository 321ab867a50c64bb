#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ozlab::cli {

enum ExitCode : int { ok = 0, domain_error = 1, usage_error = 2 };

// args excludes the program name
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ozlab::cli
