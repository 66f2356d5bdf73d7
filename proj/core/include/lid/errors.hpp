#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lid {

// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file (TSV corpus, group-map config). Carries a 1-based
// line number when one is known.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  explicit ParseError(const std::string& msg) : Error(msg), line_(0) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Training cannot proceed (empty corpus, class without features, ...).
class TrainError : public Error {
 public:
  using Error::Error;
};

// Model file cannot be written or read back (truncation, checksum
// mismatch, unsupported format version).
class ModelIoError : public Error {
 public:
  using Error::Error;
};

// Invalid runtime input (empty text to classify, unknown gold label).
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace lid
