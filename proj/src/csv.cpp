#include "erwlab/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "erwlab/errors.hpp"

namespace erwlab {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    // Shortest representation that parses back exactly.
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
}

void CsvWriter::comment(std::string_view key, std::string_view value) {
    out_ << "# " << key << ": " << value << '\n';
}

void CsvWriter::columns(std::initializer_list<std::string_view> names) {
    bool first = true;
    for (auto name : names) {
        if (!first) out_ << ',';
        out_ << name;
        first = false;
    }
    out_ << '\n';
}

void CsvWriter::write_cell(const std::string& text, bool& first) {
    if (!first) out_ << ',';
    out_ << text;
    first = false;
}

}  // namespace erwlab
