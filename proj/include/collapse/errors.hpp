#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace collapse {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ZeroVector : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class BadSubsystem : public Error {
 public:
  using Error::Error;
};

class NonFinite : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class UnsupportedDistribution : public Error {
 public:
  using Error::Error;
};

class BadSpectrum : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

class StepUnstable : public Error {
 public:
  using Error::Error;
};

class NotProductForm : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Carries every violated invariant, each prefixed with its field path.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "invalid configuration:";
    for (const auto& item : items) {
      out += "\n  ";
      out += item;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

}  // namespace collapse
