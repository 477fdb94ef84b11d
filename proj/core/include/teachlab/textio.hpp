#pragma once

#include <string>
#include <vector>

namespace teachlab {

/// Shortest decimal form that round-trips the exact double (std::to_chars).
/// Every float written to CSV/SVG goes through here so re-parsing an output
/// recovers bit-identical values.
std::string fmt_double(double v);

double parse_double(const std::string& s);

std::vector<std::string> split_csv_line(const std::string& line);

/// TEACHLAB_THREADS=1 forces strict determinism mode: timing columns are
/// zeroed so byte-identical reruns hold.
bool strict_determinism();

}  // namespace teachlab
