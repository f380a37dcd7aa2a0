#include "evoq/output.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace evoq {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()), path_(path) {
    if (!out_) throw std::runtime_error("cannot open '" + path + "' for writing");
    for (const auto& h : header) cell(h);
    end_row();
}

void CsvWriter::sep() {
    if (in_row_++ > 0) out_ << ',';
}

CsvWriter& CsvWriter::cell(double v) {
    sep();
    out_ << format_double(v);
    return *this;
}

CsvWriter& CsvWriter::cell(std::uint64_t v) {
    sep();
    out_ << v;
    return *this;
}

CsvWriter& CsvWriter::cell(int v) {
    sep();
    out_ << v;
    return *this;
}

CsvWriter& CsvWriter::cell(const std::string& v) {
    sep();
    out_ << v;
    return *this;
}

CsvWriter& CsvWriter::empty() {
    sep();
    return *this;
}

void CsvWriter::end_row() {
    if (in_row_ != columns_) {
        throw std::logic_error("CSV row in '" + path_ + "' has " + std::to_string(in_row_) + " cells, expected " +
                               std::to_string(columns_));
    }
    out_ << '\n';
    in_row_ = 0;
    if (!out_) throw std::runtime_error("write to '" + path_ + "' failed");
}

std::string metadata_path(const std::string& output) { return output + ".meta.json"; }

void write_metadata(const std::string& output, const nlohmann::json& meta) {
    std::ofstream out(metadata_path(output), std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + metadata_path(output) + "' for writing");
    out << meta.dump(2) << '\n';
}

} // namespace evoq
