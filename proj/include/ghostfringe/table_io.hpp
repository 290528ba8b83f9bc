#pragma once

#include "ghostfringe/correlation.hpp"
#include "ghostfringe/errors.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ghostfringe {

/// Malformed input data; line() is 1-based, 0 when not tied to a line.
class DataError : public Error {
public:
  DataError(const std::string &what, std::size_t line = 0) : Error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

inline constexpr std::string_view g2_csv_header = "x_m,g2,stderr,g2_model";
inline constexpr std::string_view singles_csv_header = "x_m,intensity,stderr";
inline constexpr std::string_view aperture_csv_header = "x_m,transmission";

/// Numeric CSV with a fixed header. Values are printed with "%.9e"; NaN is
/// written as "nan".
struct NumericTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(std::size_t j) const;
};

void write_table(std::ostream &out, std::string_view header,
                 const std::vector<std::vector<double>> &columns);

/// Parses a table whose first line must equal `header` exactly. Raises
/// DataError with the offending line number; an input without data rows
/// is an error.
NumericTable read_table(std::istream &in, std::string_view header,
                        const std::string &origin = "<csv>");

/// `model` may be empty (written as nan).
void write_g2_csv(std::ostream &out, const G2Slice &slice, const std::vector<double> &model);
void write_singles_csv(std::ostream &out, const SinglesProfile &profile);

/// Reads a g2 slice; rows with a non-finite g2 become undefined points.
G2Slice read_g2_csv(std::istream &in, const std::string &origin = "<csv>");

} // namespace ghostfringe
