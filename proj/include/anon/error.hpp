#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace anon {

/// Invalid input or violated precondition.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A search or table would exceed its configured size cap.
class GuardError : public Error {
 public:
  GuardError(const std::string& what, std::uint64_t size, std::uint64_t cap)
      : Error(what + ": size " + std::to_string(size) + " exceeds cap " + std::to_string(cap)),
        size_(size),
        cap_(cap) {}

  std::uint64_t size() const { return size_; }
  std::uint64_t cap() const { return cap_; }

 private:
  std::uint64_t size_;
  std::uint64_t cap_;
};

/// Default cap on enumerated objects (lattice cells, strategy sets, theta
/// partitions, grid profiles). ANON_GUARD_CELLS overrides it.
inline std::uint64_t guard_cap(std::uint64_t fallback = 10'000'000) {
  if (const char* env = std::getenv("ANON_GUARD_CELLS")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return fallback;
}

inline void check_guard(const std::string& what, std::uint64_t size, std::uint64_t cap) {
  if (size > cap) throw GuardError(what, size, cap);
}

}  // namespace anon
