#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "phaseslip/errors.hpp"

namespace phaseslip {

// Fixed 15-significant-digit formatting: locale independent, '.' decimal,
// round-trips to the same double at 1e-12 relative.
inline std::string format_g15(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

// Single header row, comma separated, no locale dependence.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns)
        : out_(path), ncols_(columns.size()) {
        if (!out_) throw ConfigError("cannot open output file: " + path);
        for (size_t i = 0; i < columns.size(); ++i)
            out_ << (i ? "," : "") << columns[i];
        out_ << "\n";
    }

    void row(const std::vector<double>& values) {
        for (size_t i = 0; i < values.size(); ++i)
            out_ << (i ? "," : "") << format_g15(values[i]);
        out_ << "\n";
    }

    void row_raw(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i)
            out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

private:
    std::ofstream out_;
    size_t ncols_;
};

} // namespace phaseslip
