#pragma once

// Locale-independent number formatting and a minimal CSV writer.

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace boolmodel {

/// Shortest round-trip decimal representation; "inf", "-inf", "nan" for
/// non-finite values.
std::string format_double(double v);

/// Parses the whole of `s` as a decimal double; throws std::invalid_argument.
double parse_double(std::string_view s);

class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::vector<std::string> header);

    CsvWriter& cell(double v);
    CsvWriter& cell(long long v);
    CsvWriter& cell(unsigned long long v);
    CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
    CsvWriter& cell(std::size_t v) { return cell(static_cast<unsigned long long>(v)); }
    CsvWriter& cell(bool v);
    CsvWriter& cell(std::string_view v);
    /// Terminates the current row; throws if the column count is wrong.
    void end_row();

private:
    void sep();
    std::ostream& out_;
    std::size_t columns_;
    std::size_t current_ = 0;
};

}  // namespace boolmodel
