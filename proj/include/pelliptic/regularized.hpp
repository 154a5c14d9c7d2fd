#pragma once

#include <cstdint>

#include "pelliptic/convexity.hpp"
#include "pelliptic/mollifier.hpp"
#include "pelliptic/perturbation.hpp"

namespace pell {

// Constants of the unregularized estimates, measured on normalized samples.
struct VoltarenConstants {
  std::array<double, 3> gradient{};  // sup of the three gradient ratios
  double convexity = 0;              // inf of H / (|w||zeta||eta|)
};
VoltarenConstants voltaren_constants(const BellmanParams& bp, const CoefficientTriple& abc,
                                     std::int64_t samples, std::uint64_t seed);

struct NaklofenReport {
  double nu = 0;
  std::int64_t samples = 0;
  double a_margin = kInfinity;  // min (majorant at |z|+nu - X_nu) / majorant
  double a_constant = 0;        // sup X_nu / sum (|z_j| + nu)^{s_j}
  std::array<double, 3> b_constant{};
  double b_margin = kInfinity;  // min_j (1.05 C_j - ratio_j) / (1.05 C_j)
  double c_constant = kInfinity;  // inf H / ((|w| - nu)|zeta||eta|) over |w| >= 2 nu
  double c_margin = kInfinity;    // (c_constant - c / 1.05) / (c / 1.05)
  double c_min_rel_eig = kInfinity;
  double quad_error = 0;
  bool pass() const { return a_margin >= -1e-9 && b_margin >= 0 && c_margin >= 0 && c_min_rel_eig >= -1e-12; }
};

NaklofenReport naklofen_check(const BellmanParams& bp, const CoefficientTriple& abc,
                              const VoltarenConstants& k, const Mollifier<3>& mol, double nu,
                              std::int64_t samples, std::uint64_t seed, int order = 3);

struct IzumrudReport {
  double nu = 0;
  std::int64_t samples = 0;
  std::array<double, 3> constants{};  // sup ratios for (i), (ii), (iii)
  double origin_gradient = 0;
  double quad_error = 0;
  bool pass() const {
    return std::isfinite(constants[0]) && std::isfinite(constants[1]) &&
           std::isfinite(constants[2]) && origin_gradient <= 1e-10;
  }
};

IzumrudReport izumrud_check(const BellmanParams& bp, const Mollifier<3>& mol, double nu,
                            std::int64_t samples, std::uint64_t seed, int order = 3);

// max / min of positive constants
double spread(const std::vector<double>& v);

// X_{n,nu} = psi_n (X * phi_nu) + C nu^{m-2} (P_{M,n} * phi_nu)
class Xnnu {
 public:
  Xnnu(const BellmanParams& bp, const CoefficientTriple& abc, double n, double nu, double eps,
       double C, const Mollifier<3>& mol, int order = 2);
  Jet<3> main_part(const ComplexTriple& z) const;          // psi_n (X * phi_nu)
  Jet<3> perturbation_part(const ComplexTriple& z) const;  // nu^{m-2} (P * phi_nu)
  Jet<3> operator()(const ComplexTriple& z) const;
  Jet<3> mollified_bellman(const ComplexTriple& z) const;  // X * phi_nu
  const PerturbationFamily& family() const { return pf_; }
  double C() const { return C_; }
  void set_C(double C) { C_ = C; }

 private:
  BellmanEvaluator X_;
  PerturbationFamily pf_;
  double n_, nu_, C_, scale_;
  const Mollifier<3>& mol_;
  int order_;
};

struct JugoplastikaReport {
  double n = 0, nu = 0;
  std::int64_t samples = 0;
  double C_required = 0;  // largest per-sample minimal C on the shell
  double C_accepted = 0;  // first doubling value above C_required
  int doublings = 0;
  double min_rel_eig = kInfinity;  // at C_accepted
  double plateau_gap = 0;          // |X_{n,nu} - X_nu - C nu^{m-2} P_nu| inside |w| <= n
  double evenness = 0;             // max |d_{conj z_j} X_{n,nu}| with z_j = 0
  double quad_error = 0;
  bool pass() const { return min_rel_eig >= -1e-12 && plateau_gap <= 1e-12 && evenness <= 1e-9; }
};

JugoplastikaReport jugoplastika_check(const BellmanParams& bp, const CoefficientTriple& abc,
                                      double n, double nu, double eps, const Mollifier<3>& mol,
                                      std::int64_t samples, std::uint64_t seed,
                                      double C0 = 1.0 / 64, int max_doublings = 40);

}  // namespace pell
