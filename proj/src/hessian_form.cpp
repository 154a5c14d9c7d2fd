#include "pelliptic/hessian_form.hpp"

#include <algorithm>

namespace pell {

RealVector stack_direction(const Direction& X) {
  const int N = static_cast<int>(X.size());
  const int d = N ? static_cast<int>(X[0].size()) : 0;
  RealVector w(2 * N * d);
  for (int j = 0; j < N; ++j) {
    if (X[j].size() != d) throw SchemaError("direction components differ in dimension");
    w.segment(2 * j * d, d) = X[j].real();
    w.segment((2 * j + 1) * d, d) = X[j].imag();
  }
  return w;
}

Direction unstack_direction(const RealVector& w, int N, int d) {
  Direction X(N);
  for (int j = 0; j < N; ++j) {
    X[j].resize(d);
    for (int i = 0; i < d; ++i)
      X[j](i) = Complex(w(2 * j * d + i), w((2 * j + 1) * d + i));
  }
  return X;
}

double hessian_form(const RealMatrix& D2, const MatrixTuple& A, const Direction& X) {
  const int N = static_cast<int>(A.size());
  if (static_cast<int>(X.size()) != N || D2.rows() != 2 * N)
    throw SchemaError("hessian_form: arity mismatch");
  const int d = static_cast<int>(X[0].size());
  RealMatrix Y(2 * N, d), Z(2 * N, d);
  for (int j = 0; j < N; ++j) {
    Y.row(2 * j) = X[j].real().transpose();
    Y.row(2 * j + 1) = X[j].imag().transpose();
    const ComplexVector ax = A[j] * X[j];
    Z.row(2 * j) = ax.real().transpose();
    Z.row(2 * j + 1) = ax.imag().transpose();
  }
  return (D2 * Y).cwiseProduct(Z).sum();
}

RealMatrix hessian_form_matrix(const RealMatrix& D2, const MatrixTuple& A) {
  const int N = static_cast<int>(A.size());
  const int d = static_cast<int>(A[0].rows());
  const int n = 2 * N * d;
  RealMatrix K = RealMatrix::Zero(n, n);
  for (int a = 0; a < 2 * N; ++a)
    for (int b = 0; b < 2 * N; ++b)
      K.block(a * d, b * d, d, d).diagonal().setConstant(D2(a, b));
  RealMatrix M = RealMatrix::Zero(n, n);
  for (int j = 0; j < N; ++j) M.block(2 * j * d, 2 * j * d, 2 * d, 2 * d) = realize(A[j]);
  RealMatrix S = K * M;
  return 0.5 * (S + S.transpose());
}

double hessian_form_min(const RealMatrix& D2, const MatrixTuple& A) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(hessian_form_matrix(D2, A),
                                               Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SolverError("hessian_form_min: eigensolver failed");
  return es.eigenvalues()(0);
}

double hessian_form(const SmoothFunction& phi, const MatrixTuple& A, const ComplexVector& w,
                    const Direction& X) {
  if (w.size() != phi.N) throw SchemaError("hessian_form: point has wrong arity");
  if (!phi.in_c2_domain(w)) throw DomainError("hessian_form: point outside the C2 domain");
  return hessian_form(phi.hessian(w), A, X);
}

double hessian_form_tilde(const SmoothFunction& phi, const MatrixTuple& A, const ComplexVector& w,
                          const Direction& X) {
  Direction Y = X;
  for (std::size_t j = 0; j < Y.size(); ++j) Y[j] *= w(j);
  return hessian_form(phi, A, w, Y);
}

double delta_of(const MatrixTuple& A, double p) {
  double v = kInfinity;
  for (const auto& a : A) v = std::min(v, delta_p_exact(a, p).value);
  return v;
}

double lambda_of(const MatrixTuple& A) { return delta_of(A, 2.0); }

double Lambda_of(const MatrixTuple& A) {
  double v = 0;
  for (const auto& a : A) v = std::max(v, pell::Lambda_of(a));
  return v;
}

}  // namespace pell
