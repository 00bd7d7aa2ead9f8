#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace fohs {

// Comma-separated output with a header row; doubles are written with 17
// significant digits so values round-trip exactly.
class CsvWriter {
public:
    using Cell = std::variant<double, long long, std::string>;

    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    void row(const std::vector<Cell>& cells);

private:
    std::ofstream out_;
    std::size_t columns_;
};

std::string format_double(double value);

} // namespace fohs
