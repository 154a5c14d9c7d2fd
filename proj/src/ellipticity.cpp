#include "pelliptic/ellipticity.hpp"

#include <algorithm>
#include <random>

namespace pell {

namespace {

double form_value(const ComplexMatrix& a, const ComplexVector& xi, double t) {
  const ComplexVector ax = a * xi;
  const ComplexVector y = xi + t * xi.conjugate();
  return y.dot(ax).real();  // Eigen's dot conjugates the first argument
}

ComplexVector from_real(const RealVector& x) { return complex_view(x); }

// Roberts' generalized golden ratio: the unique positive root of x^{k+1} = x + 1.
double generalized_phi(int k) {
  double x = 2.0;
  for (int i = 0; i < 64; ++i) x = std::pow(1.0 + x, 1.0 / (k + 1));
  return x;
}

}  // namespace

double delta_p_bruteforce(const ComplexMatrix& a, double p, std::int64_t samples,
                          std::uint64_t seed, bool refine) {
  if (samples < 1) throw SchemaError("delta_p_bruteforce: samples must be positive");
  const double t = conjugation_gap(p);
  const int d = static_cast<int>(a.rows());
  const int n = 2 * d;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double g = generalized_phi(n);
  RealVector alpha(n), shift(n);
  for (int k = 0; k < n; ++k) {
    alpha(k) = std::fmod(1.0 / std::pow(g, k + 1), 1.0);
    shift(k) = unif(rng);
  }

  const int keep = refine ? 8 : 1;
  std::vector<std::pair<double, RealVector>> best;
  RealVector x(n);
  for (std::int64_t s = 0; s < samples; ++s) {
    for (int k = 0; k + 1 < n; k += 2) {
      const double u1 = std::fmod(shift(k) + (s + 1) * alpha(k), 1.0);
      const double u2 = std::fmod(shift(k + 1) + (s + 1) * alpha(k + 1), 1.0);
      const double rad = std::sqrt(-2.0 * std::log(std::max(u1, 1e-300)));
      x(k) = rad * std::cos(2 * M_PI * u2);
      x(k + 1) = rad * std::sin(2 * M_PI * u2);
    }
    const double nrm = x.norm();
    if (nrm == 0) continue;
    x /= nrm;
    const double v = form_value(a, from_real(x), t);
    if (static_cast<int>(best.size()) < keep || v < best.back().first) {
      best.emplace_back(v, x);
      std::sort(best.begin(), best.end(),
                [](const auto& l, const auto& r) { return l.first < r.first; });
      if (static_cast<int>(best.size()) > keep) best.pop_back();
    }
  }
  if (!refine) return best.front().first;

  auto q = [&](const RealVector& y) { return form_value(a, from_real(y), t); };
  double result = best.front().first;
  for (auto& [v0, x0] : best) {
    RealVector y = x0;
    double v = v0;
    for (int it = 0; it < 500; ++it) {
      // q is quadratic, so the unit-step central difference is exact
      RealVector grad(n);
      for (int k = 0; k < n; ++k) {
        RealVector e = RealVector::Zero(n);
        e(k) = 1.0;
        grad(k) = 0.5 * (q(y + e) - q(y - e));
      }
      RealVector tang = grad - grad.dot(y) * y;
      const double tn = tang.norm();
      if (tn < 1e-14) break;
      RealVector z = -tang / tn;
      const double qa = q(y), qc = q(z), qb = 0.25 * (q(y + z) - q(y - z));
      Eigen::Matrix2d m2;
      m2 << qa, qb, qb, qc;
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m2);
      const Eigen::Vector2d c = es.eigenvectors().col(0);
      RealVector next = c(0) * y + c(1) * z;
      next.normalize();
      const double vn = q(next);
      if (vn >= v - 1e-16) {
        v = std::min(v, vn);
        break;
      }
      y = next;
      v = vn;
    }
    result = std::min(result, v);
  }
  return result;
}

EllipticityReport ellipticity_report(const ComplexMatrix& a, const std::vector<double>& exponents) {
  if (!all_finite(a)) throw SchemaError("matrix has non-finite entries");
  EllipticityReport rep;
  rep.lambda = lambda_of(a);
  rep.Lambda = Lambda_of(a);
  for (double p : exponents) {
    auto r = delta_p_exact(a, p);
    rep.delta[p] = r.value;
    rep.witness[p] = r.witness;
  }
  return rep;
}

}  // namespace pell
