#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nlpesim/util/error.hpp"

namespace nlpesim {

// Shortest exact decimal form so CSV artifacts are byte-stable and
// round-trip to the same double.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[40];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        std::sscanf(shorter, "%lf", &back);
        if (back == v)
            return shorter;
    }
    return buf;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

// Text variant for tables with label columns.
inline void write_csv_text(const std::string& path, const std::vector<std::string>& header,
                           const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw data_error("csv: cannot open '" + path + "' for writing");
    for (std::size_t c = 0; c < header.size(); ++c)
        out << (c ? "," : "") << header[c];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << row[c];
        out << "\n";
    }
    if (!out)
        throw data_error("csv: write to '" + path + "' failed");
}

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::vector<std::vector<std::string>> text;
    text.reserve(rows.size());
    for (const auto& row : rows) {
        std::vector<std::string> cells;
        cells.reserve(row.size());
        for (double v : row)
            cells.push_back(format_double(v));
        text.push_back(std::move(cells));
    }
    write_csv_text(path, header, text);
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw data_error("csv: cannot open '" + path + "'");
    CsvTable table;
    std::string line;
    if (!std::getline(in, line))
        throw data_error("csv: '" + path + "' is empty");
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ','))
        table.header.push_back(cell);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::vector<double> row;
        std::stringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (used != cell.size())
                    throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw data_error("csv: '" + path + "' line " + std::to_string(line_no) +
                                 ": not a number: '" + cell + "'");
            }
        }
        if (row.size() != table.header.size())
            throw data_error("csv: '" + path + "' line " + std::to_string(line_no) +
                             ": expected " + std::to_string(table.header.size()) + " columns");
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace nlpesim
