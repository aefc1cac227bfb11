#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace blowup {

enum class errc {
  invalid_input,    // malformed data or schema violation
  precondition,     // operation called outside its domain
  overflow,         // checked 64-bit arithmetic overflowed
  not_contractible, // no final component at a nonempty stage
  limit_exceeded,   // search or enumeration guard tripped
};

inline std::string_view to_string(errc code) {
  switch (code) {
    case errc::invalid_input: return "invalid-input";
    case errc::precondition: return "precondition";
    case errc::overflow: return "overflow";
    case errc::not_contractible: return "not-contractible";
    case errc::limit_exceeded: return "limit-exceeded";
  }
  return "unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace blowup
