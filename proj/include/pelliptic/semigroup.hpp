#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Sparse>

#include "pelliptic/field.hpp"
#include "pelliptic/grid.hpp"
#include "pelliptic/sampling.hpp"

namespace pell {

using SparseMatrix = Eigen::SparseMatrix<Complex>;
using GridFunction = std::function<Complex(double, double)>;

inline constexpr int kDenseLimit = 4096;

// Gradient samples: one d-vector per (active cell, corner). Component i of the sample at
// corner k is the difference quotient along the cell edge in direction i through that corner.
struct GradientSlots {
  std::vector<int> cell, corner, node;
  double weight = 0;  // h^d / 2^d
  int size() const { return static_cast<int>(cell.size()); }
};

GradientSlots gradient_slots(const GridDomain& g);
// d x slots
ComplexMatrix nodal_gradient(const GridDomain& g, const GradientSlots& s, const ComplexVector& nodal);
// Lumped mass per grid node, zero on nodes not touching an active cell.
RealVector node_masses(const GridDomain& g);
double lp_norm(const RealVector& mass, const ComplexVector& nodal, double p);

// L = M^{-1} K on the unknowns, K = sum_slots w G^T A G, M lumped.
class DiscreteOperator {
 public:
  GridDomain grid;
  BoundaryCondition bc;
  MatrixField field;
  GradientSlots slots;
  std::vector<int> unknown;  // node -> unknown, -1 when eliminated or unused
  std::vector<int> nodes;    // unknown -> node
  RealVector mass;           // per unknown
  RealVector node_mass;      // per node
  SparseMatrix K;
  bool hermitian = false;

  int size() const { return static_cast<int>(nodes.size()); }
  ComplexVector apply(const ComplexVector& u) const;
  ComplexVector to_nodes(const ComplexVector& u) const;
  ComplexVector from_nodes(const ComplexVector& nodal) const;
  ComplexVector sample(const GridFunction& f) const;
  double norm(const ComplexVector& u, double p = 2.0) const;
  // sum over slots of w (G v)^H A (G u)
  Complex form(const ComplexVector& u, const ComplexVector& v) const;
  // sum over slots of w |G u|^2
  double gradient_energy(const ComplexVector& u) const;
  // Dense M^{-1} K, cached on first use.
  const ComplexMatrix& dense() const;

 private:
  mutable std::optional<ComplexMatrix> dense_;
};

DiscreteOperator assemble_operator(const MatrixField& field, const GridDomain& g,
                                   const BoundaryCondition& bc);

struct OperatorChecks {
  double form_identity_error = 0;  // max relative gap between v^H K u and the slot sum
  double accretivity_margin = 0;   // min (Re<Ku,u> - lambda |grad u|^2) / |grad u|^2
  double constant_residual = 0;    // |L 1| under pure Neumann, else 0
};
OperatorChecks operator_checks(const DiscreteOperator& op, int pairs, std::uint64_t seed);

struct TimeGrid {
  std::vector<double> t;  // t[0] = 0, then geometric t0 rho^k ending exactly at t_end
  double t0 = 0, rho = 1.25;
};

// Steps longer than dt_max are split uniformly.
TimeGrid geometric_time_grid(double h, double t_end, double rho = 1.25,
                             double dt_max = kInfinity);
TimeGrid scaled_time_grid(const TimeGrid& tg, double s);
// Time after which every mode of the gradient has decayed by about e^{-40}.
double decay_horizon(const DiscreteOperator& op);

enum class Scheme { BackwardEuler, CrankNicolson };

struct SemigroupTrace {
  GridDomain grid;
  Scheme scheme = Scheme::CrankNicolson;
  std::vector<double> times;
  std::vector<ComplexVector> u;       // nodal snapshots
  std::vector<ComplexMatrix> grad;    // d x slots per snapshot
  std::vector<double> norms;          // discrete L^2
  double contractivity_excess = 0;    // max(|u_{k+1}| / |u_k| - 1, 0)
  int size() const { return static_cast<int>(times.size()); }
};

// Crank-Nicolson starts with one backward-Euler step to damp the stiff modes.
SemigroupTrace evolve(const DiscreteOperator& op, const ComplexVector& f, const TimeGrid& tg,
                      Scheme scheme = Scheme::CrankNicolson);

using ScalarFunction = std::function<Complex(Complex)>;

namespace fn {
ScalarFunction identity();
ScalarFunction one();
ScalarFunction exp_decay(double t);            // e^{-tz}
ScalarFunction psi(double alpha, double t);    // (tz)^alpha e^{-tz}
ScalarFunction phi(double alpha, double t);    // Gamma(alpha, tz) / Gamma(alpha)
ScalarFunction power(double beta);             // z^beta, principal branch
ScalarFunction imaginary_power(double u);      // z^{iu}
}  // namespace fn

Complex phi_alpha(double alpha, Complex z);

// Eigen-decomposition based calculus for L = M^{-1} K, evaluated through the similar
// matrix M^{1/2} L M^{-1/2}.
class FunctionalCalculus {
 public:
  explicit FunctionalCalculus(const DiscreteOperator& op, double max_condition = 1e10);
  explicit FunctionalCalculus(const ComplexMatrix& L, double max_condition = 1e10);

  ComplexMatrix operator()(const ScalarFunction& g) const;
  ComplexVector apply(const ScalarFunction& g, const ComplexVector& v) const;
  const ComplexVector& eigenvalues() const { return eval_; }
  double condition() const { return condition_; }

 private:
  void decompose(const ComplexMatrix& Lt, bool hermitian, double max_condition);
  ComplexVector eval_;
  ComplexMatrix V_, Vinv_;
  RealVector sqrt_mass_;
  double condition_ = 1;
};

ComplexMatrix matrix_function(const ComplexMatrix& L, const ScalarFunction& g);

}  // namespace pell
