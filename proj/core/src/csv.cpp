#include "causal/csv.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "causal/errors.hpp"

namespace causal {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

Dataset parse_csv(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(origin + ": empty file");
    const std::vector<std::string> header = split_line(strip_cr(line));
    if (header.empty()) throw ParseError(origin + ": empty header (line 1)");
    std::set<std::string> seen;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (!seen.insert(header[c]).second) {
            throw ParseError(origin + ": duplicate header '" + header[c] + "' (line 1, column " +
                             std::to_string(c + 1) + ")");
        }
    }
    const std::size_t m = header.size();

    std::vector<double> cells;
    long rows = 0;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_line(line);
        if (fields.size() != m) {
            throw ParseError(origin + ": ragged row with " + std::to_string(fields.size()) +
                             " fields, expected " + std::to_string(m) + " (line " +
                             std::to_string(line_no) + ")");
        }
        for (std::size_t c = 0; c < m; ++c) {
            const std::string& f = fields[c];
            char* end = nullptr;
            const double v = std::strtod(f.c_str(), &end);
            if (f.empty() || end != f.c_str() + f.size()) {
                throw ParseError(origin + ": non-numeric cell '" + f + "' (line " +
                                 std::to_string(line_no) + ", column '" + header[c] + "')");
            }
            cells.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) throw ParseError(origin + ": no data rows");

    Eigen::MatrixXd values(rows, m);
    for (long r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < m; ++c) values(r, c) = cells[r * m + c];
    }
    try {
        return Dataset(header, std::move(values));
    } catch (const std::invalid_argument& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

Dataset read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), path);
}

std::string csv_to_string(const Dataset& data) {
    std::ostringstream out;
    const auto& names = data.names();
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (c) out << ',';
        out << names[c];
    }
    out << '\n';
    char buf[64];
    for (int r = 0; r < data.num_samples(); ++r) {
        for (int c = 0; c < data.num_vars(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", data.value(r, c));
            if (c) out << ',';
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

void write_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << csv_to_string(data);
}

}  // namespace causal
