#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace drmdp {

/// Categories surfaced to callers (and to the CLI's machine-readable error output).
enum class ErrorKind {
  InvalidArgument,
  ShapeMismatch,
  InvalidDistribution,
  NegativeVariance,
  GreedyTie,
  DegenerateVariance,
  Unstable,
  Singular,
  Io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::InvalidDistribution: return "InvalidDistribution";
    case ErrorKind::NegativeVariance: return "NegativeVariance";
    case ErrorKind::GreedyTie: return "GreedyTie";
    case ErrorKind::DegenerateVariance: return "DegenerateVariance";
    case ErrorKind::Unstable: return "Unstable";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

}  // namespace drmdp
