#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mixncut {

enum class Errc {
  invalid_argument,
  size_mismatch,
  out_of_range,
  unreadable_file,
  unsupported_format,
  malformed_image,
  zero_size_image,
  write_failed,
  undefined_ncut,
  no_convergence,
};

std::string_view to_string(Errc code) noexcept;

/// Library-wide exception. Every failure carries a stable code so callers
/// (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

inline void require(bool condition, Errc code, const char* what) {
  if (!condition) fail(code, what);
}
inline void require(bool condition, Errc code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace mixncut
