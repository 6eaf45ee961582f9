#pragma once

#include <stdexcept>
#include <string>

namespace rssm {

/// Shape of an input does not match the operation's contract.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A spectrum was too close to singular to invert safely. Carries the
/// eigenvalue that tripped the floor.
class SingularityError : public std::runtime_error {
 public:
  SingularityError(const std::string& what, double eigenvalue)
      : std::runtime_error(what), offending_eigenvalue_(eigenvalue) {}
  double offending_eigenvalue() const { return offending_eigenvalue_; }

 private:
  double offending_eigenvalue_;
};

/// Invalid solver/schedule/diagnostic configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterate drifted off the manifold beyond the hard threshold.
class FeasibilityError : public std::runtime_error {
 public:
  FeasibilityError(const std::string& what, double drift)
      : std::runtime_error(what), drift_(drift) {}
  double drift() const { return drift_; }

 private:
  double drift_;
};

/// File I/O failure; message carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rssm
