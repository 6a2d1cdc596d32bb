#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace gdf {

/// Error with a stable machine-readable code next to the human message.
/// Codes are part of the API: callers (and the CLI exit-code mapping)
/// dispatch on them.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, const std::string& code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace gdf
