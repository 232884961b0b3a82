#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace satlink {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A file that failed row validation. Carries every offending line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::vector<std::size_t> lines)
      : Error(what), lines_(std::move(lines)) {}

  const std::vector<std::size_t>& lines() const { return lines_; }

 private:
  std::vector<std::size_t> lines_;
};

class DegenerateRouteError : public Error {
 public:
  using Error::Error;
};

class AntipodalRouteError : public Error {
 public:
  using Error::Error;
};

class CoverageGapError : public Error {
 public:
  using Error::Error;
};

class SchemaMismatchError : public Error {
 public:
  using Error::Error;
};

class VersionError : public Error {
 public:
  using Error::Error;
};

class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

}  // namespace satlink
