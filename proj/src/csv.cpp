#include "fohs/csv.hpp"

#include <cstdio>

#include "fohs/error.hpp"

namespace fohs {

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path), columns_(header.size()) {
    if (!out_) {
        fail(ErrorKind::InvalidArgument, "cannot open " + path.string() + " for writing");
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        out_ << (i ? "," : "") << header[i];
    }
    out_ << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells) {
    if (cells.size() != columns_) {
        fail(ErrorKind::DimensionMismatch, "CSV row has " + std::to_string(cells.size()) +
                                               " cells, header has " + std::to_string(columns_));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) {
            out_ << ',';
        }
        std::visit(
            [this](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, double>) {
                    out_ << format_double(v);
                } else {
                    out_ << v;
                }
            },
            cells[i]);
    }
    out_ << '\n';
}

} // namespace fohs
