#pragma once

#include <stdexcept>
#include <string>

namespace haphazard {

// Error taxonomy shared by the core and mirrored as C-API status codes.
enum class Errc {
  ok = 0,
  invalid_input = 1,
  parse = 2,
  format = 3,
  ordering = 4,
  encoding = 5,
  undefined_metric = 6,
  capacity = 7,
  search = 8,
  diverged = 9,
  io = 10,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace haphazard
