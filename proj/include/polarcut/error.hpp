#pragma once

#include <stdexcept>
#include <string>

namespace polarcut {

/// Base exception. `kind()` is a stable machine-readable tag (e.g.
/// "seed_out_of_bounds") that the CLI and HTTP frontends surface verbatim.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

namespace errc {
inline constexpr const char* io = "io_error";
inline constexpr const char* bad_header = "bad_header";
inline constexpr const char* unsupported_datatype = "unsupported_datatype";
inline constexpr const char* payload_mismatch = "payload_length_mismatch";
inline constexpr const char* out_of_bounds = "out_of_bounds";
inline constexpr const char* seed_out_of_bounds = "seed_out_of_bounds";
inline constexpr const char* invalid_argument = "invalid_argument";
inline constexpr const char* conflicting_constraint = "conflicting_constraint";
inline constexpr const char* dims_mismatch = "dims_mismatch";
inline constexpr const char* bad_config = "bad_config";
inline constexpr const char* internal = "internal_error";
}  // namespace errc

}  // namespace polarcut
