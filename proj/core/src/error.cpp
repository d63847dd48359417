#include "mixncut/error.hpp"

namespace mixncut {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid argument";
    case Errc::size_mismatch: return "size mismatch";
    case Errc::out_of_range: return "index out of range";
    case Errc::unreadable_file: return "unreadable file";
    case Errc::unsupported_format: return "unsupported image format";
    case Errc::malformed_image: return "malformed image data";
    case Errc::zero_size_image: return "zero-size image";
    case Errc::write_failed: return "write failed";
    case Errc::undefined_ncut: return "normalized cut undefined";
    case Errc::no_convergence: return "eigensolver did not converge";
  }
  return "unknown error";
}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace mixncut
