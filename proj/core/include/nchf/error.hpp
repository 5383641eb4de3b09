#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nchf {

enum class ErrorKind {
  kInvalidArgument,  // caller violated a precondition
  kConfig,           // malformed or inadmissible configuration
  kIo,               // file could not be read or written
  kStepTooLarge,     // projection left the tubular neighbourhood
  kOperatorOverflow, // non-finite tension
  kCflCollapse,      // adaptive step fell below the hard floor
  kInvariant,        // a runtime invariant was violated
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when the stable step size drops below `dt_min`. Carries the cell of
/// maximal diffusivity, which is where the energy is concentrating.
class CflCollapse : public Error {
 public:
  CflCollapse(const std::string& what, double time, double dt, std::size_t cell,
              double diffusivity)
      : Error(ErrorKind::kCflCollapse, what),
        time_(time), dt_(dt), cell_(cell), diffusivity_(diffusivity) {}

  double time() const noexcept { return time_; }
  double dt() const noexcept { return dt_; }
  std::size_t cell() const noexcept { return cell_; }
  double diffusivity() const noexcept { return diffusivity_; }

 private:
  double time_;
  double dt_;
  std::size_t cell_;
  double diffusivity_;
};

}  // namespace nchf
