#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ssn {

using MemberId = std::string;

enum class Position { artist, manager };

enum class Relation { friendship, collaboration };

struct ActorAttributes {
  MemberId member_id;
  std::string group_id;
  Position position = Position::artist;
  std::string gender;
  std::string artistic_education;
  std::string genre;
};

// Bad input data or configuration: recoverable, reported to the user.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed file content (CSV/JSON/UTF-8); carries file and position info in the message.
struct ParseError : ValidationError {
  using ValidationError::ValidationError;
};

// Filesystem-level failures (missing directory, unreadable file).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical or stochastic failures at run time (degenerate chains, singular matrices).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A simulation chain pinned at an extreme graph; carries diagnostics in the message.
struct DegeneracyError : NumericalError {
  using NumericalError::NumericalError;
};

inline const char* to_string(Position p) {
  return p == Position::artist ? "artist" : "manager";
}

inline const char* to_string(Relation r) {
  return r == Relation::friendship ? "friendship" : "collaboration";
}

inline Position position_from_string(const std::string& s) {
  if (s == "artist") return Position::artist;
  if (s == "manager") return Position::manager;
  throw ValidationError("unknown position '" + s + "' (expected artist or manager)");
}

inline Relation relation_from_string(const std::string& s) {
  if (s == "friendship") return Relation::friendship;
  if (s == "collaboration") return Relation::collaboration;
  throw ValidationError("unknown relation '" + s + "' (expected friendship or collaboration)");
}

// Deterministic cross-platform RNG helpers.  std::uniform_int_distribution and
// std::uniform_real_distribution are implementation-defined, so results would
// differ between standard libraries; these mappings are pinned.
template <class Engine>
std::uint64_t uniform_below(Engine& eng, std::uint64_t bound) {
  // rejection sampling to avoid modulo bias
  const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
  for (;;) {
    const std::uint64_t x = eng();
    if (x < limit) return x % bound;
  }
}

template <class Engine>
double uniform_unit(Engine& eng) {
  // 53-bit mantissa in [0, 1)
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace ssn
