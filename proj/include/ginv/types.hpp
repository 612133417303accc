#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace ginv {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised when a map or functional produces a non-finite value.
class NumericalError : public std::runtime_error {
public:
  NumericalError(const std::string& what, Vec location)
      : std::runtime_error(what), location_(std::move(location)) {}

  const Vec& location() const noexcept { return location_; }

private:
  Vec location_;
};

/// Raised for malformed input: unknown map names, bad vectors, invalid configs.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

inline bool all_finite(const Vec& v) { return v.allFinite(); }
inline bool all_finite(const Mat& m) { return m.allFinite(); }

std::string format_vec(const Vec& v);

}  // namespace ginv
