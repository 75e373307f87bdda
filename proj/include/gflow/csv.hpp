#pragma once

#include <string>
#include <vector>

#include "gflow/linalg.hpp"

namespace gflow {

// Fixed output formatting shared by every report writer: 17 significant
// digits, '.' decimal separator, '\n' line endings. Identical inputs must
// produce byte-identical files.
std::string format_double(double x);
std::string csv_row(const std::vector<std::string>& cells);
std::string csv_header(const std::string& subcommand); // "# groupoid-flow v1 <subcommand>"

} // namespace gflow
