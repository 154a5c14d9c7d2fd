#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace pell {

struct Rule1D {
  std::vector<double> x, w;
};

// Gauss-Legendre on [a, b].
Rule1D gauss_legendre(int n, double a = 0.0, double b = 1.0);

// Gauss-Laguerre for the weight e^{-x} on (0, inf).
Rule1D gauss_laguerre(int n);

// n-point Gauss rule for the discrete measure sum_i w_i delta_{x_i} (Stieltjes + Golub-Welsch).
Rule1D gauss_from_discrete(const Rule1D& measure, int n);

// Rule for the uniform measure on the simplex {s_j >= 0, sum s_j = 1} in R^N, collapsed
// Gauss-Legendre with k points per direction. N = 1 is the single point s = 1.
struct SimplexRule {
  std::vector<std::vector<double>> s;
  std::vector<double> w;
};
SimplexRule simplex_rule(int N, int k);

// Composite Simpson on [a, b] with n (even) panels.
double simpson(const std::function<double(double)>& f, double a, double b, int n);

}  // namespace pell
