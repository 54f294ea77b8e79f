#pragma once

#include <stdexcept>
#include <string>

namespace oldroyd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an operation's precondition is broken by the caller
/// (wrong representation, non-mean-zero input to a homogeneous operator, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Invalid or inconsistent configuration. `key()` names the offending entry
/// when one is known.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message, std::string key = {})
      : Error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace oldroyd
