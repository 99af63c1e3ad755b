#ifndef USM_ERRORS_HPP
#define USM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace usm {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidInput : Error {
  using Error::Error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct NotSymmetric : Error {
  using Error::Error;
};

struct NotUnitarySymmetric : Error {
  using Error::Error;
};

struct CayleySingular : Error {
  using Error::Error;
};

struct DegenerateBaseline : Error {
  using Error::Error;
};

/// Parse error for the .cmx matrix format; carries the 1-based line number.
struct FormatError : Error {
  FormatError(const std::string& msg, int line_number)
      : Error(msg + " (line " + std::to_string(line_number) + ")"),
        line(line_number) {}
  int line;
};

}  // namespace usm

#endif
