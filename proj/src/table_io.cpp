#include "ghostfringe/table_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>

namespace ghostfringe {

namespace {

std::string format_value(double v) {
  if (std::isnan(v))
    return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

std::vector<std::string> split(const std::string &line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos)
      break;
    start = comma + 1;
  }
  return out;
}

double parse_number(const std::string &field, std::size_t line, const std::string &origin) {
  std::size_t a = 0, b = field.size();
  while (a < b && (field[a] == ' ' || field[a] == '\t'))
    ++a;
  while (b > a && (field[b - 1] == ' ' || field[b - 1] == '\t'))
    --b;
  const std::string token = field.substr(a, b - a);
  if (token.empty())
    throw DataError(origin + ":" + std::to_string(line) + ": empty field", line);
  char *end = nullptr;
  errno = 0;
  const double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size() || errno == ERANGE)
    throw DataError(origin + ":" + std::to_string(line) + ": not a number: '" + token + "'", line);
  return v;
}

} // namespace

std::vector<double> NumericTable::column(std::size_t j) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto &r : rows)
    out.push_back(r.at(j));
  return out;
}

void write_table(std::ostream &out, std::string_view header,
                 const std::vector<std::vector<double>> &columns) {
  out << header << '\n';
  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  for (const auto &c : columns)
    if (c.size() != n)
      throw InvalidArgument("table columns differ in length");
  std::string line;
  for (std::size_t i = 0; i < n; ++i) {
    line.clear();
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (j)
        line += ',';
      line += format_value(columns[j][i]);
    }
    line += '\n';
    out << line;
  }
}

NumericTable read_table(std::istream &in, std::string_view header, const std::string &origin) {
  NumericTable table;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (!have_header) {
      if (line != header)
        throw DataError(origin + ":" + std::to_string(lineno) + ": expected header '" +
                            std::string(header) + "', got '" + line + "'",
                        lineno);
      table.columns = split(line);
      have_header = true;
      continue;
    }
    if (line.empty())
      continue;
    const auto fields = split(line);
    if (fields.size() != table.columns.size())
      throw DataError(origin + ":" + std::to_string(lineno) + ": expected " +
                          std::to_string(table.columns.size()) + " fields, got " +
                          std::to_string(fields.size()),
                      lineno);
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto &f : fields)
      row.push_back(parse_number(f, lineno, origin));
    table.rows.push_back(std::move(row));
  }
  if (!have_header)
    throw DataError(origin + ": empty input");
  if (table.rows.empty())
    throw DataError(origin + ": no data rows");
  return table;
}

void write_g2_csv(std::ostream &out, const G2Slice &slice, const std::vector<double> &model) {
  std::vector<double> m = model;
  if (m.empty())
    m.assign(slice.size(), std::numeric_limits<double>::quiet_NaN());
  write_table(out, g2_csv_header, {slice.positions, slice.g2, slice.standard_error, m});
}

void write_singles_csv(std::ostream &out, const SinglesProfile &profile) {
  write_table(out, singles_csv_header, {profile.positions, profile.mean, profile.standard_error});
}

G2Slice read_g2_csv(std::istream &in, const std::string &origin) {
  const auto table = read_table(in, g2_csv_header, origin);
  G2Slice slice;
  slice.positions = table.column(0);
  slice.g2 = table.column(1);
  slice.standard_error = table.column(2);
  slice.defined.resize(slice.size());
  for (std::size_t i = 0; i < slice.size(); ++i) {
    if (!std::isfinite(slice.positions[i]))
      throw DataError(origin + ": non-finite position in data row " + std::to_string(i + 1),
                      i + 2);
    slice.defined[i] = std::isfinite(slice.g2[i]) ? 1 : 0;
  }
  return slice;
}

} // namespace ghostfringe
