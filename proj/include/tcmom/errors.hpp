#pragma once

#include <stdexcept>
#include <string>

namespace tcmom {

enum class ErrorKind {
  InvalidGeometry,
  PortDestroyed,
  EmptyMesh,
  PortUnrealizable,
  UnsolvableMesh,
  InvalidInput,
  InvalidPort,
  UndefinedNormalization,
  IndefiniteR,
  SolverFailure,
  ConfigError,
  IoError,
};

// Single exception type; `kind` maps to the CLI exit code
// (numerical failures -> 3, everything else -> 2).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  bool numerical() const {
    return kind_ == ErrorKind::SolverFailure || kind_ == ErrorKind::IndefiniteR;
  }

 private:
  ErrorKind kind_;
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidGeometry: return "invalid-geometry";
    case ErrorKind::PortDestroyed: return "port-destroyed";
    case ErrorKind::EmptyMesh: return "empty-mesh";
    case ErrorKind::PortUnrealizable: return "port-unrealizable";
    case ErrorKind::UnsolvableMesh: return "unsolvable-mesh";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::InvalidPort: return "invalid-port";
    case ErrorKind::UndefinedNormalization: return "undefined-normalization";
    case ErrorKind::IndefiniteR: return "indefinite-R";
    case ErrorKind::SolverFailure: return "solver-failure";
    case ErrorKind::ConfigError: return "config-error";
    case ErrorKind::IoError: return "io-error";
  }
  return "unknown";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, std::string(error_kind_name(kind)) + ": " + msg);
}

}  // namespace tcmom
