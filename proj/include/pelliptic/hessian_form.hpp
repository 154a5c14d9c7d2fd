#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pelliptic/ellipticity.hpp"

namespace pell {

// Phi : C^N -> R, real coordinates ordered (Re w1, Im w1, Re w2, ...).
struct SmoothFunction {
  int N = 1;
  std::function<double(const ComplexVector&)> value;
  std::function<RealVector(const ComplexVector&)> gradient;
  std::function<RealMatrix(const ComplexVector&)> hessian;
  std::function<bool(const ComplexVector&)> in_c2_domain = [](const ComplexVector&) { return true; };
};

using MatrixTuple = std::vector<ComplexMatrix>;
using Direction = std::vector<ComplexVector>;

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// W(X): blocks (Re X1, Im X1, Re X2, ...), each of length d.
RealVector stack_direction(const Direction& X);
Direction unstack_direction(const RealVector& w, int N, int d);

// <(D2 (x) I_d) W(X), (M(A1) + ... + M(AN)) W(X)>
double hessian_form(const RealMatrix& D2, const MatrixTuple& A, const Direction& X);
// symmetric S with H = W(X)^T S W(X)
RealMatrix hessian_form_matrix(const RealMatrix& D2, const MatrixTuple& A);
// smallest eigenvalue of hessian_form_matrix, i.e. min of H over unit X
double hessian_form_min(const RealMatrix& D2, const MatrixTuple& A);

double hessian_form(const SmoothFunction& phi, const MatrixTuple& A, const ComplexVector& w,
                    const Direction& X);
double hessian_form_tilde(const SmoothFunction& phi, const MatrixTuple& A, const ComplexVector& w,
                          const Direction& X);

double delta_of(const MatrixTuple& A, double p);  // min over the tuple
double lambda_of(const MatrixTuple& A);
double Lambda_of(const MatrixTuple& A);

}  // namespace pell
