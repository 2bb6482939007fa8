#pragma once

#include <stdexcept>
#include <string>

namespace insar {

/// Invalid configuration, unparseable input, or inputs that cannot satisfy
/// an operation's preconditions (bad trajectory coverage, etc.).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Corrupt or truncated binary artifact.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Input outside the numerical domain of an operation.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace insar
