#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "depthmon/window.hpp"

// Stream ingestion. The accepted layout is a header row `index,time,v1,...,vd`
// where the `time` column is optional; every field must be numeric.
namespace depthmon::core {

/// Parses observations; throws IoError naming `source` and the 1-based line on
/// malformed input, and std::invalid_argument when rows violate stream
/// invariants (non-finite values, non-increasing index or time).
[[nodiscard]] std::vector<Observation> read_observations_csv(std::istream& in,
                                                             std::string_view source = "<stream>");
[[nodiscard]] std::vector<Observation> read_observations_csv(const std::filesystem::path& path);

void write_observations_csv(std::ostream& out, const std::vector<Observation>& observations);

/// Shortest round-trip decimal representation of a double.
[[nodiscard]] std::string format_double(double value);

}  // namespace depthmon::core
