#pragma once

#include <stdexcept>
#include <string>

namespace cdgakit {

/// Malformed or inconsistent input (dimension mismatch, bad degrees, unknown names).
class InputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A mathematical precondition of an operation does not hold
/// (not 1-connected, no surjective leg, not locally constant, ...).
class PreconditionError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// The requested computation needs data above the truncation cutoff.
class CutoffTooSmall : public std::runtime_error {
public:
  CutoffTooSmall(const std::string& what, int needed)
      : std::runtime_error(what + " (needs cutoff >= " + std::to_string(needed) + ")"),
        needed_(needed) {}

  int needed() const noexcept { return needed_; }

private:
  int needed_;
};

}  // namespace cdgakit
