#pragma once

#include <cstdint>
#include <random>

#include "pelliptic/hessian_form.hpp"

namespace pell {

// F_p(w) = |w|^p on C^N
SmoothFunction power_function(double p, int N);
// G_{s1} (x) ... (x) G_{sN}, with G_s(z) = |z|^s / s
SmoothFunction tensor_power(const std::vector<double>& s);

// 2x2 real Hessian of F_p on C, from D^2F_p(z) xi = (p^2/2)|z|^{p-2} sgn z I_p(sgn conj(z) xi)
Eigen::Matrix2d power_hessian_1d(Complex z, double p);

struct HessianFormReport {
  std::string kind;
  double value = 0;
  double bound = 0;
  double margin = 0;
};

HessianFormReport vinjerac(const ComplexMatrix& A, double p, Complex u, const ComplexVector& alpha);
HessianFormReport metajna(const ComplexMatrix& A, const ComplexMatrix& B, double r, double s,
                          const ComplexVector& u, const Direction& alpha);
HessianFormReport zhenodraga(const MatrixTuple& A, const std::vector<double>& exps,
                             const ComplexVector& u, const Direction& alpha);
// |w| = 1 is enforced by normalizing w
HessianFormReport debeluh(const MatrixTuple& A, double p, const ComplexVector& w, const Direction& X);

// Closed-form sum of the Batman identity (I) for |w| = 1, equal to p^{-1} H_{F_p}.
double batman_sum(const MatrixTuple& A, double p, const ComplexVector& w, const Direction& X);

struct PsResult {
  double sigma = 0;        // inflated empirical constant
  double sigma_tilde = 0;  // (N-1) sigma / 2
  double c = 0;
  SmoothFunction P;
};

// F_s(u) + c sum_j F_s(u_j), with c chosen as described for the perturbed power functions.
PsResult build_Ps(double s, const MatrixTuple& A, std::int64_t sigma_samples = 20000,
                  std::uint64_t seed = 1);
// smallest c > 0 with c T^{1+e/2} + 1/2 >= st T on [0,1]
double smallest_c(double sigma_tilde, double eps);
SmoothFunction Ps_function(double s, double c, int N);

}  // namespace pell
