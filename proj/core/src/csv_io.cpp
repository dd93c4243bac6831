#include "aor/csv_io.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "aor/errors.hpp"

namespace aor {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s, std::size_t line, const std::string& col) {
    double value = 0.0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw CsvError(line, "cannot parse '" + s + "' as a number in column " + col);
    return value;
}

int parse_label(const std::string& s, std::size_t line, const std::string& col, int lo, int hi) {
    int value = 0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw CsvError(line, "cannot parse '" + s + "' as an integer in column " + col);
    if (value < lo || value > hi)
        throw CsvError(line, "column " + col + " value " + std::to_string(value) +
                                 " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return value;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r')
        s.pop_back();
    return s;
}

} // namespace

GroupLabeledDataset ingest_feature_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");

    std::string raw;
    if (!std::getline(in, raw))
        throw CsvError(1, "empty file");
    const auto header = split_fields(strip_cr(raw));

    // Header must be f0..f{d-1}, then optionally y, then g.
    std::size_t d = 0;
    while (d < header.size() && header[d] == "f" + std::to_string(d))
        ++d;
    if (d == 0)
        throw CsvError(1, "header must start with feature column 'f0', got '" +
                              (header.empty() ? std::string() : header[0]) + "'");
    bool has_y = false;
    std::size_t pos = d;
    if (pos < header.size() && header[pos] == "y") {
        has_y = true;
        ++pos;
    }
    if (pos >= header.size() || header[pos] != "g")
        throw CsvError(1, "header must end with column 'g'");
    if (pos + 1 != header.size())
        throw CsvError(1, "unexpected trailing header column '" + header[pos + 1] + "'");

    const std::size_t expected = d + (has_y ? 2u : 1u);
    std::vector<double> values;
    std::vector<int> y;
    std::vector<int> g;
    std::size_t line_no = 1;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = strip_cr(raw);
        if (line.empty())
            continue; // tolerate a trailing blank line
        const auto fields = split_fields(line);
        if (fields.size() != expected)
            throw CsvError(line_no, "expected " + std::to_string(expected) + " fields, got " +
                                        std::to_string(fields.size()));
        for (std::size_t c = 0; c < d; ++c) {
            const double v = parse_double(fields[c], line_no, "f" + std::to_string(c));
            if (!std::isfinite(v))
                throw CsvError(line_no, "non-finite value in column f" + std::to_string(c));
            values.push_back(v);
        }
        if (has_y)
            y.push_back(parse_label(fields[d], line_no, "y", 0, 3));
        g.push_back(parse_label(fields[expected - 1], line_no, "g", 0, 1));
    }

    GroupLabeledDataset ds;
    ds.X = Matrix(g.size(), d);
    ds.X.data = std::move(values);
    ds.y = std::move(y);
    ds.g = std::move(g);
    return ds;
}

void export_feature_csv(const GroupLabeledDataset& ds, const std::string& path) {
    validate(ds);
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");

    std::ostringstream line;
    for (std::size_t c = 0; c < ds.X.cols; ++c) {
        if (c > 0)
            line << ',';
        line << 'f' << c;
    }
    if (ds.has_task_labels())
        line << ",y";
    line << ",g\n";
    out << line.str();

    char buf[64];
    for (std::size_t r = 0; r < ds.size(); ++r) {
        std::string row;
        for (std::size_t c = 0; c < ds.X.cols; ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", ds.X.at(r, c));
            if (c > 0)
                row += ',';
            row += buf;
        }
        if (ds.has_task_labels()) {
            row += ',';
            row += std::to_string(ds.y[r]);
        }
        row += ',';
        row += std::to_string(ds.g[r]);
        row += '\n';
        out << row;
    }
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

} // namespace aor
