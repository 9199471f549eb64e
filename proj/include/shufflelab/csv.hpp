#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace shufflelab {

// Fixed %.17g rendering: enough digits to round-trip a double, and byte-stable
// across runs, which the determinism contract leans on.
inline std::string csv_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

// Minimal CSV assembly; all outputs are UTF-8 with LF line endings.
class CsvWriter {
public:
    explicit CsvWriter(std::string header) { text_ = std::move(header) + "\n"; }

    CsvWriter& field(const std::string& value) {
        if (!row_.empty()) row_ += ",";
        row_ += value;
        return *this;
    }
    CsvWriter& field(double value) { return field(csv_double(value)); }
    CsvWriter& field(int value) { return field(std::to_string(value)); }
    CsvWriter& field(long value) { return field(std::to_string(value)); }
    CsvWriter& field(unsigned long long value) { return field(std::to_string(value)); }
    CsvWriter& field(bool value) { return field(std::string(value ? "1" : "0")); }

    void end_row() {
        text_ += row_ + "\n";
        row_.clear();
    }

    const std::string& str() const { return text_; }

private:
    std::string text_;
    std::string row_;
};

}  // namespace shufflelab
