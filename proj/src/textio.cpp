#include "fieldsense/textio.hpp"

#include "fieldsense/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fieldsense::textio {

namespace {

std::string where(const std::filesystem::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line) + ": ";
}

bool is_blank_or_comment(std::string_view line) {
    for (char c : line) {
        if (c == '#')
            return true;
        if (c != ' ' && c != '\t' && c != '\r')
            return false;
    }
    return true;
}

} // namespace

std::vector<std::string_view> split_whitespace(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
            ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r')
            ++j;
        if (j > i)
            out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::string format_double(double value) {
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buf[32];
    // %.17g always round-trips; try shorter first so "1" stays "1".
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value)
            break;
    }
    return buf;
}

double parse_double(std::string_view token, std::size_t line, const std::filesystem::path& path) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        fail(ErrorKind::Format, where(path, line) + "invalid number '" + std::string(token) + "'");
    return value;
}

long long parse_integer(std::string_view token, std::size_t line, const std::filesystem::path& path) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        fail(ErrorKind::Format, where(path, line) + "invalid integer '" + std::string(token) + "'");
    return value;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        lines.push_back(line);
    return lines;
}

void write_text(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
    out << contents;
    out.flush();
    if (!out)
        fail(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

Matrix read_matrix(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    std::size_t i = 0;
    while (i < lines.size() && is_blank_or_comment(lines[i]))
        ++i;
    if (i == lines.size())
        fail(ErrorKind::Format, where(path, 1) + "missing '<rows> <cols>' header");

    const auto header = split_whitespace(lines[i]);
    if (header.size() != 2)
        fail(ErrorKind::Format, where(path, i + 1) + "malformed header, expected '<rows> <cols>'");
    const long long rows = parse_integer(header[0], i + 1, path);
    const long long cols = parse_integer(header[1], i + 1, path);
    if (rows < 0 || cols < 0)
        fail(ErrorKind::Format, where(path, i + 1) + "negative dimension in header");
    ++i;

    Matrix data(rows, cols);
    long long row = 0;
    for (; i < lines.size(); ++i) {
        if (is_blank_or_comment(lines[i]))
            continue;
        if (row == rows)
            fail(ErrorKind::Format, where(path, i + 1) + "more rows than the header declares");
        const auto tokens = split_whitespace(lines[i]);
        if (static_cast<long long>(tokens.size()) != cols)
            fail(ErrorKind::Format, where(path, i + 1) + "expected " + std::to_string(cols) +
                                        " values, found " + std::to_string(tokens.size()));
        for (long long c = 0; c < cols; ++c) {
            const double v = parse_double(tokens[c], i + 1, path);
            if (!std::isfinite(v))
                fail(ErrorKind::Format, where(path, i + 1) + "non-finite value");
            data(row, c) = v;
        }
        ++row;
    }
    if (row != rows)
        fail(ErrorKind::Format, where(path, lines.size()) + "expected " + std::to_string(rows) +
                                    " rows, found " + std::to_string(row));
    return data;
}

void write_matrix(const std::filesystem::path& path, const Matrix& data,
                  const std::vector<std::string>& comments) {
    std::ostringstream out;
    for (const auto& c : comments)
        out << "# " << c << '\n';
    out << data.rows() << ' ' << data.cols() << '\n';
    for (Index r = 0; r < data.rows(); ++r) {
        for (Index c = 0; c < data.cols(); ++c) {
            if (c)
                out << ' ';
            out << format_double(data(r, c));
        }
        out << '\n';
    }
    write_text(path, out.str());
}

std::vector<Index> read_index_list(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    std::vector<Index> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (is_blank_or_comment(lines[i]))
            continue;
        const auto tokens = split_whitespace(lines[i]);
        if (tokens.size() != 1)
            fail(ErrorKind::Format, where(path, i + 1) + "expected one index per line");
        const long long v = parse_integer(tokens[0], i + 1, path);
        if (v < 0)
            fail(ErrorKind::Format, where(path, i + 1) + "negative index");
        out.push_back(static_cast<Index>(v));
    }
    return out;
}

void write_index_list(const std::filesystem::path& path, const std::vector<Index>& indices) {
    std::ostringstream out;
    for (Index i : indices)
        out << i << '\n';
    write_text(path, out.str());
}

} // namespace fieldsense::textio
