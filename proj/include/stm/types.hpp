#ifndef STM_TYPES_HPP
#define STM_TYPES_HPP

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace stm {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;

// Error kinds. Each carries a short machine-readable tag used by the CLI.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};
struct DimensionError : Error {
  using Error::Error;
  const char* kind() const noexcept override { return "dimension"; }
};
struct ParameterError : Error {
  using Error::Error;
  const char* kind() const noexcept override { return "parameter"; }
};
struct DomainError : Error {
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
};
struct FormatError : Error {
  using Error::Error;
  const char* kind() const noexcept override { return "format"; }
};
struct ConfigError : Error {
  using Error::Error;
  const char* kind() const noexcept override { return "config"; }
};

}  // namespace stm

#endif  // STM_TYPES_HPP
