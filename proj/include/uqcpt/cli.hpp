#pragma once

// The uqcpt command-line front end, callable in-process.

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace uqcpt::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kNumerical = 3 };

/// One numeric column read from a CSV file, with optional row labels.
struct Series {
  std::vector<double> values;
  std::vector<std::string> labels;  ///< empty unless an index column was requested
  std::string column;               ///< header name, or "column N" without a header
};

/// Comma-separated, optional single header row. Picks `column` (header name or
/// 1-based position) or else the first numeric column. Throws uqcpt::Error
/// naming the offending line.
[[nodiscard]] Series read_series(std::istream& in, const std::optional<std::string>& column,
                                 const std::optional<std::string>& index_column);

/// Runs the CLI with argv[0] as program name; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload for tests: args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uqcpt::cli
