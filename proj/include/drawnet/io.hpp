#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace drawnet::io {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Strict full-field parse; throws std::invalid_argument.
double parse_double(std::string_view text);

std::string_view trim(std::string_view s);

std::vector<std::string_view> split(std::string_view line, char sep = ',');

/// Dense headered matrix CSV: first row `entity,<name_1>,...`, then one row
/// per entity. Values use format_double, so write/read is lossless.
void write_matrix_csv(std::ostream& out, const std::vector<std::string>& names,
                      const Eigen::MatrixXd& m);

struct NamedMatrix {
    std::vector<std::string> names;
    Eigen::MatrixXd values;
};

NamedMatrix read_matrix_csv(std::istream& in);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace drawnet::io
