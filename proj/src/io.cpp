#include "drawnet/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace drawnet::io {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf.data(), ptr);
}

double parse_double(std::string_view text) {
    text = trim(text);
    if (text == "nan") return std::nan("");
    if (text == "inf") return INFINITY;
    if (text == "-inf") return -INFINITY;
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (text.empty() || ec != std::errc{} || ptr != last) {
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    }
    return v;
}

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

void write_matrix_csv(std::ostream& out, const std::vector<std::string>& names,
                      const Eigen::MatrixXd& m) {
    if (names.size() != static_cast<std::size_t>(m.rows()) || m.rows() != m.cols()) {
        throw std::invalid_argument("write_matrix_csv: shape does not match names");
    }
    out << "entity";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << names[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << format_double(m(i, j));
        out << '\n';
    }
}

NamedMatrix read_matrix_csv(std::istream& in) {
    NamedMatrix result;
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("matrix CSV: empty input");
    auto header = split(trim(line));
    if (header.empty() || trim(header[0]) != "entity") {
        throw std::invalid_argument("matrix CSV: header must start with 'entity'");
    }
    for (std::size_t k = 1; k < header.size(); ++k) result.names.emplace_back(trim(header[k]));
    const auto n = static_cast<Eigen::Index>(result.names.size());
    result.values.setZero(n, n);
    Eigen::Index row = 0;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto fields = split(trim(line));
        if (row >= n || static_cast<Eigen::Index>(fields.size()) != n + 1 ||
            trim(fields[0]) != result.names[static_cast<std::size_t>(row)]) {
            throw std::invalid_argument("matrix CSV: malformed row at line " +
                                        std::to_string(lineno));
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            result.values(row, j) = parse_double(fields[static_cast<std::size_t>(j) + 1]);
        }
        ++row;
    }
    if (row != n) throw std::invalid_argument("matrix CSV: expected " + std::to_string(n) + " rows");
    return result;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace drawnet::io
