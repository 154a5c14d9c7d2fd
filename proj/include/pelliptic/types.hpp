#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace pell {

using Complex = std::complex<double>;

template <typename Scalar>
using ComplexMatrixT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using ComplexVectorT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using RealMatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RealVectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using ComplexMatrix = ComplexMatrixT<double>;
using ComplexVector = ComplexVectorT<double>;
using RealMatrix = RealMatrixT<double>;
using RealVector = RealVectorT<double>;

// Error categories map onto distinct CLI exit codes.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonconvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetExhausted : std::runtime_error {
  double best_margin;
  BudgetExhausted(const std::string& what, double best)
      : std::runtime_error(what), best_margin(best) {}
};
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pell
