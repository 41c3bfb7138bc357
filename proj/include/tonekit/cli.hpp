#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tonekit::cli {

// Subcommands: tone, bounds, invariance, green, distortion, bessel,
// spectrum-equiv. Returns 0 on success, 2 when a reported inequality or
// bracket fails, 1 on any error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// `key = value` lines; `#` starts a comment; quotes around the value are
// stripped. Throws ParseError with the line number.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path);

} // namespace tonekit::cli
