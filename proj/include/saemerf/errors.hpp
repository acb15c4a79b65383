#ifndef SAEMERF_ERRORS_HPP
#define SAEMERF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace saemerf {

// Base error carrying a stable machine-readable category ("io", "format",
// "data", "numeric"); the CLI maps categories to exit codes.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}
  const std::string& category() const { return category_; }

 private:
  std::string category_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("io", message) {}
};

// Malformed input files: missing columns, bad cells, header mismatches.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& message) : Error("format", message) {}
};

// Semantically invalid data: empty areas, N < n, non-finite responses.
class DataError : public Error {
 public:
  explicit DataError(const std::string& message) : Error("data", message) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& message) : Error("numeric", message) {}
};

// Requested a sample-based quantity for an area with no sampled units.
class OutOfSampleError : public DataError {
 public:
  explicit OutOfSampleError(const std::string& message) : DataError(message) {}
};

}  // namespace saemerf

#endif  // SAEMERF_ERRORS_HPP
