#pragma once

#include <stdexcept>
#include <string>

namespace fracwave {

/// Precondition violation: non-finite input, negative time, bad index, ...
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the region where a quantity is defined (poles, vacuous
/// bounds, L below the critical degree).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical method could not reach the requested accuracy.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved error estimate " +
                           std::to_string(achieved) + ")"),
        achieved_(achieved) {}

  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace fracwave
