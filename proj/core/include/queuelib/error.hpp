#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace queuelib {

// Malformed or inconsistent input data. Carries every offending row so a
// validator can list them all instead of stopping at the first one.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& message)
      : std::runtime_error(message), issues_{message} {}

  explicit InputError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out;
    for (const auto& s : issues) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> issues_;
};

// A numeric evaluation outside the domain of a cost function, for example a
// residual queue that consumes the whole link capacity.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace queuelib
