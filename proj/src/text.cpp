#include "boolmodel/text.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace boolmodel {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("not a number: '" + std::string(s) + "'");
    return v;
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header)
    : out_(out), columns_(header.size()) {
    for (const auto& h : header) cell(std::string_view(h));
    end_row();
}

void CsvWriter::sep() {
    if (current_ >= columns_) throw std::logic_error("csv row has too many cells");
    if (current_ > 0) out_ << ',';
    ++current_;
}

CsvWriter& CsvWriter::cell(double v) {
    sep();
    out_ << format_double(v);
    return *this;
}

CsvWriter& CsvWriter::cell(long long v) {
    sep();
    out_ << v;
    return *this;
}

CsvWriter& CsvWriter::cell(unsigned long long v) {
    sep();
    out_ << v;
    return *this;
}

CsvWriter& CsvWriter::cell(bool v) {
    sep();
    out_ << (v ? "true" : "false");
    return *this;
}

CsvWriter& CsvWriter::cell(std::string_view v) {
    sep();
    out_ << v;
    return *this;
}

void CsvWriter::end_row() {
    if (current_ != columns_) throw std::logic_error("csv row has too few cells");
    out_ << '\n';
    current_ = 0;
}

}  // namespace boolmodel
