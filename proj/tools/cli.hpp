#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace swexp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCompareFailed = 1;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitResourceCap = 3;

// Runs one command line (args excludes the program name). Results go to
// `out` unless an output file or directory is selected; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Fixed textual form shared by every CSV writer: %.10g, "inf", "-inf", "nan".
std::string format_number(double value);
double parse_number(const std::string& text);

}  // namespace swexp::cli
