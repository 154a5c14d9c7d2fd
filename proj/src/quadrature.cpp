#include "pelliptic/quadrature.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "pelliptic/types.hpp"

namespace pell {

namespace {

Rule1D golub_welsch(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta, double mu0) {
  const int n = static_cast<int>(alpha.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = alpha(i);
    if (i + 1 < n) J(i, i + 1) = J(i + 1, i) = std::sqrt(beta(i + 1));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success) throw SolverError("golub_welsch: eigen solver failed");
  Rule1D r;
  for (int i = 0; i < n; ++i) {
    r.x.push_back(es.eigenvalues()(i));
    r.w.push_back(mu0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i));
  }
  return r;
}

}  // namespace

Rule1D gauss_legendre(int n, double a, double b) {
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n), beta = Eigen::VectorXd::Zero(n);
  for (int k = 1; k < n; ++k) beta(k) = 1.0 / (4.0 - 1.0 / (double(k) * k));
  Rule1D r = golub_welsch(alpha, beta, 2.0);
  for (int i = 0; i < n; ++i) {
    r.x[i] = a + 0.5 * (b - a) * (r.x[i] + 1);
    r.w[i] *= 0.5 * (b - a);
  }
  return r;
}

Rule1D gauss_laguerre(int n) {
  Eigen::VectorXd alpha(n), beta = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k) {
    alpha(k) = 2.0 * k + 1.0;
    if (k > 0) beta(k) = double(k) * k;
  }
  return golub_welsch(alpha, beta, 1.0);
}

Rule1D gauss_from_discrete(const Rule1D& m, int n) {
  const std::size_t M = m.x.size();
  std::vector<double> pm1(M, 0.0), p0(M, 1.0), p1(M);
  Eigen::VectorXd alpha(n), beta = Eigen::VectorXd::Zero(n);
  double mu0 = 0, norm_prev = 0;
  for (std::size_t i = 0; i < M; ++i) mu0 += m.w[i];
  for (int k = 0; k < n; ++k) {
    double nrm = 0, xp = 0;
    for (std::size_t i = 0; i < M; ++i) {
      nrm += m.w[i] * p0[i] * p0[i];
      xp += m.w[i] * m.x[i] * p0[i] * p0[i];
    }
    alpha(k) = xp / nrm;
    if (k > 0) beta(k) = nrm / norm_prev;
    for (std::size_t i = 0; i < M; ++i)
      p1[i] = (m.x[i] - alpha(k)) * p0[i] - (k > 0 ? beta(k) * pm1[i] : 0.0);
    pm1.swap(p0);
    p0.swap(p1);
    norm_prev = nrm;
  }
  return golub_welsch(alpha, beta, mu0);
}

SimplexRule simplex_rule(int N, int k) {
  SimplexRule out;
  if (N == 1) {
    out.s.push_back({1.0});
    out.w.push_back(1.0);
    return out;
  }
  // s_1 = x, remaining coordinates are (1 - x) times a point of the smaller simplex
  const SimplexRule inner = simplex_rule(N - 1, k);
  const Rule1D g = gauss_legendre(k);
  for (std::size_t a = 0; a < g.x.size(); ++a) {
    const double x = g.x[a], scale = 1 - x;
    const double jac = std::pow(scale, N - 2);
    for (std::size_t b = 0; b < inner.s.size(); ++b) {
      std::vector<double> s = {x};
      for (double v : inner.s[b]) s.push_back(scale * v);
      out.s.push_back(std::move(s));
      out.w.push_back(g.w[a] * inner.w[b] * jac);
    }
  }
  return out;
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3;
}

}  // namespace pell
