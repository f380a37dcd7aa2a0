#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace evoq {

inline constexpr const char* kVersion = "0.1.0";

// Shortest decimal form that parses back to the same double ('.' separator).
std::string format_double(double v);

// Minimal CSV writer: header first, then rows of preformatted cells.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    CsvWriter& cell(double v);
    CsvWriter& cell(std::uint64_t v);
    CsvWriter& cell(int v);
    CsvWriter& cell(const std::string& v);
    CsvWriter& empty();
    void end_row();

private:
    void sep();

    std::ofstream out_;
    std::size_t columns_ = 0;
    std::size_t in_row_ = 0;
    std::string path_;
};

// "<output>.meta.json"
std::string metadata_path(const std::string& output);

void write_metadata(const std::string& output, const nlohmann::json& meta);

} // namespace evoq
