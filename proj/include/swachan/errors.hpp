#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace swa {

/// Grid conversion could not find required rows; lists the missing n values.
class CoverageError : public std::runtime_error {
 public:
  CoverageError(const std::string& what, std::vector<std::int64_t> missing)
      : std::runtime_error(what), missing_(std::move(missing)) {}

  const std::vector<std::int64_t>& missing() const noexcept { return missing_; }

 private:
  std::vector<std::int64_t> missing_;
};

/// Mobile speed at or above the propagation speed.
class UnsupportedRegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Bad run configuration (file, key, or value).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace swa
