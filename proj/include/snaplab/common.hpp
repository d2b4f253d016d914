#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace snaplab {

// Component values are opaque byte strings. Protocols that need structure
// (rounds, reals) encode it themselves with the helpers below.
using Value = std::string;

enum class Errc {
  StepOnTerminated,
  AlternationViolation,
  ForeignComponent,
  BadComponentList,
  DuplicateTimestamp,
  MalformedTrace,
  TooLarge,
  LocalSimBudgetExceeded,
  ProtocolMisbehavior,
  MissingRevisionSource,
  BadParameters,
  BadN,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::StepOnTerminated: return "StepOnTerminated";
    case Errc::AlternationViolation: return "AlternationViolation";
    case Errc::ForeignComponent: return "ForeignComponent";
    case Errc::BadComponentList: return "BadComponentList";
    case Errc::DuplicateTimestamp: return "DuplicateTimestamp";
    case Errc::MalformedTrace: return "MalformedTrace";
    case Errc::TooLarge: return "TooLarge";
    case Errc::LocalSimBudgetExceeded: return "LocalSimBudgetExceeded";
    case Errc::ProtocolMisbehavior: return "ProtocolMisbehavior";
    case Errc::MissingRevisionSource: return "MissingRevisionSource";
    case Errc::BadParameters: return "BadParameters";
    case Errc::BadN: return "BadN";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

// splitmix64; self-contained so seeded runs are identical across platforms.
struct Rng {
  uint64_t state;

  explicit Rng(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). n must be positive.
  uint64_t below(uint64_t n) { return next() % n; }

  int pick(int n) { return static_cast<int>(below(static_cast<uint64_t>(n))); }
};

inline uint64_t fnv1a64(const void* data, size_t len, uint64_t h = 0xcbf29ce484222325ull) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t fnv1a64(const std::string& s, uint64_t h = 0xcbf29ce484222325ull) {
  return fnv1a64(s.data(), s.size(), h);
}

inline std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string digest(const std::string& s) { return hex64(fnv1a64(s)); }

// Numeric encodings for values. Doubles use %.17g so they round-trip exactly.
inline Value int_value(long long v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld", v);
  return buf;
}

inline Value real_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline long long value_as_int(const Value& v) { return std::strtoll(v.c_str(), nullptr, 10); }

inline double value_as_real(const Value& v) { return std::strtod(v.c_str(), nullptr); }

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace snaplab
