#pragma once

// Command-line front end. Every subcommand produces a JSON report
//   {command, config: {seed, params, inputs}, result, timing}
// where inputs maps each input file to its path and FNV-1a hash. `replay`
// re-executes a report's config and byte-compares the result.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

namespace f2ac::cli {

/// Exit statuses.
inline constexpr int kHolds = 0;
inline constexpr int kViolated = 1;
inline constexpr int kUndecided = 2;  // also precondition and I/O errors

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

/// args excludes the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace f2ac::cli
