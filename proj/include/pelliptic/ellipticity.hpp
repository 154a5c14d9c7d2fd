#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "pelliptic/types.hpp"

namespace pell {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// |1 - 2/p|, with p = inf giving 1.
template <typename Scalar>
Scalar conjugation_gap(Scalar p) {
  if (!(p > 0)) throw std::domain_error("exponent must be positive");
  if (std::isinf(p)) return Scalar(1);
  return std::abs(Scalar(1) - Scalar(2) / p);
}

template <typename Scalar>
Scalar conjugate_exponent(Scalar p) {
  if (std::isinf(p)) return Scalar(1);
  if (p == Scalar(1)) return std::numeric_limits<Scalar>::infinity();
  return p / (p - Scalar(1));
}

// [[Re A, -Im A], [Im A, Re A]]
template <typename Derived>
RealMatrixT<typename Derived::RealScalar> realize(const Eigen::MatrixBase<Derived>& a) {
  using R = typename Derived::RealScalar;
  const Eigen::Index d = a.rows();
  RealMatrixT<R> m(2 * d, 2 * d);
  m.topLeftCorner(d, d) = a.real();
  m.topRightCorner(d, d) = -a.imag();
  m.bottomLeftCorner(d, d) = a.imag();
  m.bottomRightCorner(d, d) = a.real();
  return m;
}

template <typename Derived>
RealVectorT<typename Derived::RealScalar> real_view(const Eigen::MatrixBase<Derived>& xi) {
  const Eigen::Index d = xi.size();
  RealVectorT<typename Derived::RealScalar> x(2 * d);
  x.head(d) = xi.real();
  x.tail(d) = xi.imag();
  return x;
}

template <typename Derived>
ComplexVectorT<typename Derived::Scalar> complex_view(const Eigen::MatrixBase<Derived>& x) {
  using R = typename Derived::Scalar;
  const Eigen::Index d = x.size() / 2;
  ComplexVectorT<R> xi(d);
  for (Eigen::Index i = 0; i < d; ++i) xi(i) = std::complex<R>(x(i), x(d + i));
  return xi;
}

template <typename Derived>
ComplexVectorT<typename Derived::RealScalar> ip_transform(const Eigen::MatrixBase<Derived>& xi,
                                                          typename Derived::RealScalar p) {
  using R = typename Derived::RealScalar;
  if (!(p > 0)) throw std::domain_error("ip_transform: p must be positive");
  const R k = std::isinf(p) ? R(1) : R(1) - R(2) / p;
  return xi + k * xi.conjugate();
}

template <typename Scalar>
struct DeltaResult {
  Scalar value;
  ComplexVectorT<Scalar> witness;
};

// Symmetric part of J_t M(A); its quadratic form is Re<A xi, xi + t conj(xi)>.
template <typename Derived>
RealMatrixT<typename Derived::RealScalar> delta_form(const Eigen::MatrixBase<Derived>& a,
                                                     typename Derived::RealScalar p) {
  using R = typename Derived::RealScalar;
  const R t = conjugation_gap(p);
  const Eigen::Index d = a.rows();
  RealMatrixT<R> jm = realize(a);
  jm.topRows(d) *= (R(1) + t);
  jm.bottomRows(d) *= (R(1) - t);
  return R(0.5) * (jm + jm.transpose());
}

template <typename Derived>
DeltaResult<typename Derived::RealScalar> delta_p_exact(const Eigen::MatrixBase<Derived>& a,
                                                        typename Derived::RealScalar p) {
  using R = typename Derived::RealScalar;
  if (a.rows() != a.cols() || a.rows() == 0) throw SchemaError("delta_p: matrix must be square");
  Eigen::SelfAdjointEigenSolver<RealMatrixT<R>> es(delta_form(a, p));
  if (es.info() != Eigen::Success) throw SolverError("delta_p: symmetric eigensolver failed");
  return {es.eigenvalues()(0), complex_view(es.eigenvectors().col(0))};
}

template <typename Derived>
typename Derived::RealScalar lambda_of(const Eigen::MatrixBase<Derived>& a) {
  return delta_p_exact(a, typename Derived::RealScalar(2)).value;
}

template <typename Derived>
typename Derived::RealScalar Lambda_of(const Eigen::MatrixBase<Derived>& a) {
  using M = ComplexMatrixT<typename Derived::RealScalar>;
  Eigen::JacobiSVD<M> svd(a.eval());
  return svd.singularValues()(0);
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& a) {
  return a.real().allFinite() && a.imag().allFinite();
}

// Sampling oracle: quasi-uniform points on S^{2d-1}, then great-circle descent
// from the best few. Only complex arithmetic on the original form is used.
double delta_p_bruteforce(const ComplexMatrix& a, double p, std::int64_t samples,
                          std::uint64_t seed = 0, bool refine = true);

struct EllipticityReport {
  double lambda = 0;
  double Lambda = 0;
  std::map<double, double> delta;
  std::map<double, ComplexVector> witness;
};

EllipticityReport ellipticity_report(const ComplexMatrix& a, const std::vector<double>& exponents);

}  // namespace pell
