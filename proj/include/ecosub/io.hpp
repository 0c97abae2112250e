#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace ecosub {

// Writes via a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Shortest round-trip decimal form, '.' separator regardless of locale.
std::string fmt_double(double x);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    CsvWriter& row(const std::vector<std::string>& cells);
    std::string str() const { return out_; }

private:
    size_t cols_;
    std::string out_;
};

std::string json_text(const nlohmann::json& j);

}  // namespace ecosub
