#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <type_traits>
#include <string>
#include <string_view>

namespace erwlab {

// Shortest round-trippable decimal form ("%.17g" trimmed); deterministic, so
// identical runs produce byte-identical files.
std::string format_double(double v);

// CSV with '#'-prefixed header comments, comma separators, LF line endings.
class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path);

    void comment(std::string_view key, std::string_view value);
    void columns(std::initializer_list<std::string_view> names);

    template <typename... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        (write_cell(cell_text(cells), first), ...);
        out_ << '\n';
    }

    void flush() { out_.flush(); }

private:
    static std::string cell_text(double v) { return format_double(v); }
    static std::string cell_text(float v) { return format_double(v); }
    static std::string cell_text(bool v) { return v ? "1" : "0"; }
    static std::string cell_text(const std::string& v) { return v; }
    static std::string cell_text(const char* v) { return v; }
    template <typename T>
        requires std::is_integral_v<T>
    static std::string cell_text(T v) {
        return std::to_string(v);
    }

    void write_cell(const std::string& text, bool& first);

    std::ofstream out_;
};

}  // namespace erwlab
