#include "gflow/csv.hpp"

#include <cstdio>

namespace gflow {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string csv_row(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    out += '\n';
    return out;
}

std::string csv_header(const std::string& subcommand) {
    return "# groupoid-flow v1 " + subcommand + "\n";
}

} // namespace gflow
