#include "pelliptic/semigroup.hpp"

#include <cmath>

#include <Eigen/SparseLU>

#include "pelliptic/quadrature.hpp"

namespace pell {

GradientSlots gradient_slots(const GridDomain& g) {
  GradientSlots s;
  s.weight = std::pow(g.h, g.dim) / g.corners();
  for (int c = 0; c < g.num_cells(); ++c) {
    if (!g.is_active(c)) continue;
    for (int k = 0; k < g.corners(); ++k) {
      s.cell.push_back(c);
      s.corner.push_back(k);
      s.node.push_back(g.corner_node(c, k));
    }
  }
  return s;
}

namespace {

// Endpoints of the cell edge along direction i through corner k.
struct Stencil {
  int lo, hi;
};

Stencil edge(const GridDomain& g, int c, int k, int i) {
  if (i == 0) {
    const int by = k & 2;
    return {g.corner_node(c, by), g.corner_node(c, by | 1)};
  }
  const int bx = k & 1;
  return {g.corner_node(c, bx), g.corner_node(c, bx | 2)};
}

}  // namespace

ComplexMatrix nodal_gradient(const GridDomain& g, const GradientSlots& s,
                             const ComplexVector& nodal) {
  ComplexMatrix G(g.dim, s.size());
  for (int j = 0; j < s.size(); ++j)
    for (int i = 0; i < g.dim; ++i) {
      const Stencil e = edge(g, s.cell[j], s.corner[j], i);
      G(i, j) = (nodal(e.hi) - nodal(e.lo)) / g.h;
    }
  return G;
}

RealVector node_masses(const GridDomain& g) {
  RealVector m = RealVector::Zero(g.num_nodes());
  const double w = std::pow(g.h, g.dim) / g.corners();
  for (int c = 0; c < g.num_cells(); ++c)
    if (g.is_active(c))
      for (int k = 0; k < g.corners(); ++k) m(g.corner_node(c, k)) += w;
  return m;
}

double lp_norm(const RealVector& mass, const ComplexVector& nodal, double p) {
  if (std::isinf(p)) return nodal.cwiseAbs().maxCoeff();
  double s = 0;
  for (Eigen::Index i = 0; i < nodal.size(); ++i)
    if (mass(i) > 0) s += mass(i) * std::pow(std::abs(nodal(i)), p);
  return std::pow(s, 1.0 / p);
}

ComplexVector DiscreteOperator::apply(const ComplexVector& u) const {
  return (K * u).cwiseQuotient(mass.cast<Complex>());
}

ComplexVector DiscreteOperator::to_nodes(const ComplexVector& u) const {
  ComplexVector out = ComplexVector::Zero(grid.num_nodes());
  for (int i = 0; i < size(); ++i) out(nodes[i]) = u(i);
  return out;
}

ComplexVector DiscreteOperator::from_nodes(const ComplexVector& nodal) const {
  ComplexVector out(size());
  for (int i = 0; i < size(); ++i) out(i) = nodal(nodes[i]);
  return out;
}

ComplexVector DiscreteOperator::sample(const GridFunction& f) const {
  ComplexVector out(size());
  for (int i = 0; i < size(); ++i) {
    const auto x = grid.node_position(nodes[i]);
    out(i) = f(x[0], x[1]);
  }
  return out;
}

double DiscreteOperator::norm(const ComplexVector& u, double p) const {
  return lp_norm(mass, u, p);
}

Complex DiscreteOperator::form(const ComplexVector& u, const ComplexVector& v) const {
  const ComplexMatrix Gu = nodal_gradient(grid, slots, to_nodes(u));
  const ComplexMatrix Gv = nodal_gradient(grid, slots, to_nodes(v));
  Complex s = 0;
  for (int j = 0; j < slots.size(); ++j)
    s += Gv.col(j).dot(field.cells[slots.cell[j]] * Gu.col(j));
  return s * slots.weight;
}

double DiscreteOperator::gradient_energy(const ComplexVector& u) const {
  return nodal_gradient(grid, slots, to_nodes(u)).squaredNorm() * slots.weight;
}

const ComplexMatrix& DiscreteOperator::dense() const {
  if (!dense_) {
    if (size() > kDenseLimit) throw PreconditionError("grid too large for dense calculus");
    ComplexMatrix L = ComplexMatrix(K);
    for (int i = 0; i < size(); ++i) L.row(i) /= mass(i);
    dense_ = std::move(L);
  }
  return *dense_;
}

DiscreteOperator assemble_operator(const MatrixField& field, const GridDomain& g,
                                   const BoundaryCondition& bc) {
  g.validate();
  bc.validate(g);
  field.validate(g);
  if (field.d != g.dim) throw SchemaError("field dimension differs from grid dimension");

  DiscreteOperator op;
  op.grid = g;
  op.bc = bc;
  op.field = field;
  op.slots = gradient_slots(g);
  op.node_mass = node_masses(g);

  std::vector<char> eliminated(g.num_nodes(), 0);
  for (int c = 0; c < g.num_cells(); ++c)
    for (int s = 0; s < 2 * g.dim; ++s)
      if (g.is_boundary_facet(c, s) && bc.facet_dirichlet(g, c, s))
        for (int n : g.facet_nodes(c, s)) eliminated[n] = 1;

  op.unknown.assign(g.num_nodes(), -1);
  for (int n = 0; n < g.num_nodes(); ++n)
    if (op.node_mass(n) > 0 && !eliminated[n]) {
      op.unknown[n] = op.size();
      op.nodes.push_back(n);
    }
  if (op.size() == 0) throw SchemaError("no unknowns left after boundary elimination");

  op.mass.resize(op.size());
  for (int i = 0; i < op.size(); ++i) op.mass(i) = op.node_mass(op.nodes[i]);

  std::vector<Eigen::Triplet<Complex>> trip;
  const double w = op.slots.weight, h = g.h;
  op.hermitian = true;
  for (int j = 0; j < op.slots.size(); ++j) {
    const ComplexMatrix& A = field.cells[op.slots.cell[j]];
    for (int a = 0; a < g.dim; ++a) {
      const Stencil ea = edge(g, op.slots.cell[j], op.slots.corner[j], a);
      const int ra[2] = {op.unknown[ea.lo], op.unknown[ea.hi]};
      for (int b = 0; b < g.dim; ++b) {
        const Stencil eb = edge(g, op.slots.cell[j], op.slots.corner[j], b);
        const int cb[2] = {op.unknown[eb.lo], op.unknown[eb.hi]};
        const Complex v = w * A(a, b) / (h * h);
        for (int s = 0; s < 2; ++s)
          for (int t = 0; t < 2; ++t)
            if (ra[s] >= 0 && cb[t] >= 0)
              trip.emplace_back(ra[s], cb[t], (s == t ? 1.0 : -1.0) * v);
      }
    }
  }
  for (int c = 0; c < g.num_cells(); ++c)
    if (g.is_active(c) && !field.cells[c].isApprox(field.cells[c].adjoint(), 1e-14))
      op.hermitian = false;
  op.K.resize(op.size(), op.size());
  op.K.setFromTriplets(trip.begin(), trip.end());
  op.K.makeCompressed();
  return op;
}

OperatorChecks operator_checks(const DiscreteOperator& op, int pairs, std::uint64_t seed) {
  OperatorChecks r;
  Rng rng = make_stream(seed, hash_string("operator_checks"));
  const double lam = op.field.lambda();
  r.accretivity_margin = kInfinity;
  for (int k = 0; k < pairs; ++k) {
    const ComplexVector u = complex_normal_vector(rng, op.size());
    const ComplexVector v = complex_normal_vector(rng, op.size());
    const Complex lhs = v.dot(op.K * u);
    const Complex rhs = op.form(u, v);
    const double scale = std::max(std::abs(rhs), std::sqrt(op.gradient_energy(u) * op.gradient_energy(v)));
    r.form_identity_error = std::max(r.form_identity_error, std::abs(lhs - rhs) / scale);
    const double e = op.gradient_energy(u);
    if (e > 0)
      r.accretivity_margin =
          std::min(r.accretivity_margin, (op.form(u, u).real() - lam * e) / e);
  }
  const int used = static_cast<int>((op.node_mass.array() > 0).count());
  if (op.size() == used) {
    r.constant_residual = op.apply(ComplexVector::Ones(op.size())).cwiseAbs().maxCoeff();
  }
  return r;
}

TimeGrid geometric_time_grid(double h, double t_end, double rho, double dt_max) {
  if (!(h > 0) || !(t_end > 0) || !(rho > 1)) throw SchemaError("time grid needs h, t_end > 0, rho > 1");
  TimeGrid tg;
  tg.rho = rho;
  tg.t0 = std::min(h * h / 4.0, t_end);
  tg.t.push_back(0.0);
  for (double t = tg.t0; t * rho <= t_end; t *= rho) tg.t.push_back(t);
  if (t_end > tg.t.back() * (1 + 1e-9)) tg.t.push_back(t_end);
  if (std::isfinite(dt_max)) {
    if (!(dt_max > 0)) throw SchemaError("time grid needs dt_max > 0");
    std::vector<double> fine{0.0};
    for (std::size_t k = 1; k < tg.t.size(); ++k) {
      const double a = tg.t[k - 1], len = tg.t[k] - a;
      const int pieces = static_cast<int>(std::ceil(len / dt_max - 1e-12));
      for (int i = 1; i < pieces; ++i) fine.push_back(a + len * i / pieces);
      fine.push_back(tg.t[k]);
    }
    tg.t = std::move(fine);
  }
  return tg;
}

TimeGrid scaled_time_grid(const TimeGrid& tg, double s) {
  TimeGrid out = tg;
  out.t0 *= s;
  for (double& t : out.t) t *= s;
  return out;
}

double decay_horizon(const DiscreteOperator& op) {
  const double lam = op.field.lambda();
  if (!(lam > 0)) throw PreconditionError("decay horizon needs an elliptic field");
  const double diam = op.grid.h * std::max(op.grid.nx, op.grid.dim == 2 ? op.grid.ny : 1);
  return 16.0 * diam * diam / lam;
}

SemigroupTrace evolve(const DiscreteOperator& op, const ComplexVector& f, const TimeGrid& tg,
                      Scheme scheme) {
  if (f.size() != op.size()) throw SchemaError("evolve: initial datum has the wrong size");
  SemigroupTrace tr;
  tr.grid = op.grid;
  tr.scheme = scheme;
  tr.times = tg.t;
  const int n = op.size();
  SparseMatrix M(n, n);
  M.reserve(Eigen::VectorXi::Constant(n, 1));
  for (int i = 0; i < n; ++i) M.insert(i, i) = op.mass(i);

  auto record = [&](const ComplexVector& u) {
    ComplexVector nodal = op.to_nodes(u);
    tr.grad.push_back(nodal_gradient(op.grid, op.slots, nodal));
    tr.u.push_back(std::move(nodal));
    tr.norms.push_back(op.norm(u));
  };

  ComplexVector u = f;
  record(u);
  Eigen::SparseLU<SparseMatrix> lu;
  for (std::size_t k = 0; k + 1 < tg.t.size(); ++k) {
    const double dt = tg.t[k + 1] - tg.t[k];
    const double theta = (scheme == Scheme::BackwardEuler || k == 0) ? 1.0 : 0.5;
    const SparseMatrix S = M + Complex(theta * dt) * op.K;
    ComplexVector rhs = op.mass.cast<Complex>().cwiseProduct(u);
    if (theta < 1) rhs -= Complex((1 - theta) * dt) * (op.K * u);
    lu.compute(S);
    if (lu.info() != Eigen::Success)
      throw SolverError("evolve: factorization failed at step " + std::to_string(k));
    u = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !u.allFinite())
      throw SolverError("evolve: solve failed at step " + std::to_string(k));
    record(u);
    if (tr.norms[k] > 0)
      tr.contractivity_excess = std::max(tr.contractivity_excess, tr.norms[k + 1] / tr.norms[k] - 1.0);
  }
  return tr;
}

Complex phi_alpha(double alpha, Complex z) {
  if (!(alpha > 0)) throw SchemaError("phi_alpha needs alpha > 0");
  if (z == Complex(0)) return 1.0;
  static const Rule1D rule = gauss_laguerre(64);
  Complex s = 0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * std::pow(z + rule.x[i], alpha - 1);
  return std::exp(-z) * s / std::tgamma(alpha);
}

namespace fn {

ScalarFunction identity() {
  return [](Complex z) { return z; };
}
ScalarFunction one() {
  return [](Complex) { return Complex(1); };
}
ScalarFunction exp_decay(double t) {
  return [t](Complex z) { return std::exp(-t * z); };
}
ScalarFunction psi(double alpha, double t) {
  return [alpha, t](Complex z) {
    const Complex w = t * z;
    if (w == Complex(0)) return Complex(alpha == 0 ? 1.0 : 0.0);
    return std::pow(w, alpha) * std::exp(-w);
  };
}
ScalarFunction phi(double alpha, double t) {
  return [alpha, t](Complex z) { return phi_alpha(alpha, t * z); };
}
ScalarFunction power(double beta) {
  return [beta](Complex z) { return z == Complex(0) ? Complex(0) : std::pow(z, beta); };
}
ScalarFunction imaginary_power(double u) {
  return [u](Complex z) {
    if (z == Complex(0)) throw PreconditionError("imaginary power of a singular operator");
    return std::exp(Complex(0, u) * std::log(z));
  };
}

}  // namespace fn

FunctionalCalculus::FunctionalCalculus(const DiscreteOperator& op, double max_condition) {
  if (op.size() > kDenseLimit) throw PreconditionError("grid too large for dense calculus");
  sqrt_mass_ = op.mass.cwiseSqrt();
  ComplexMatrix Lt = ComplexMatrix(op.K);
  const RealVector s = sqrt_mass_.cwiseInverse();
  Lt = s.cast<Complex>().asDiagonal() * Lt * s.cast<Complex>().asDiagonal();
  decompose(Lt, op.hermitian, max_condition);
}

FunctionalCalculus::FunctionalCalculus(const ComplexMatrix& L, double max_condition) {
  if (L.rows() > kDenseLimit) throw PreconditionError("matrix too large for dense calculus");
  sqrt_mass_ = RealVector::Ones(L.rows());
  decompose(L, L.isApprox(L.adjoint(), 1e-14), max_condition);
}

void FunctionalCalculus::decompose(const ComplexMatrix& Lt, bool hermitian, double max_condition) {
  if (hermitian) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(Lt);
    if (es.info() != Eigen::Success) throw NonconvergenceError("functional calculus: eigensolver failed");
    eval_ = es.eigenvalues().cast<Complex>();
    V_ = es.eigenvectors();
    Vinv_ = V_.adjoint();
    condition_ = 1;
    return;
  }
  Eigen::ComplexEigenSolver<ComplexMatrix> es(Lt);
  if (es.info() != Eigen::Success) throw NonconvergenceError("functional calculus: eigensolver failed");
  eval_ = es.eigenvalues();
  V_ = es.eigenvectors();
  Vinv_ = V_.partialPivLu().inverse();
  auto norm1 = [](const ComplexMatrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); };
  condition_ = norm1(V_) * norm1(Vinv_);
  if (!(condition_ <= max_condition))
    throw NonconvergenceError("functional calculus: eigenvector condition " +
                              std::to_string(condition_) + " above threshold");
}

ComplexMatrix FunctionalCalculus::operator()(const ScalarFunction& g) const {
  ComplexVector gv(eval_.size());
  for (Eigen::Index i = 0; i < eval_.size(); ++i) gv(i) = g(eval_(i));
  ComplexMatrix out = V_ * gv.asDiagonal() * Vinv_;
  const ComplexVector s = sqrt_mass_.cast<Complex>();
  return s.cwiseInverse().asDiagonal() * out * s.asDiagonal();
}

ComplexVector FunctionalCalculus::apply(const ScalarFunction& g, const ComplexVector& v) const {
  ComplexVector c = Vinv_ * sqrt_mass_.cast<Complex>().cwiseProduct(v);
  for (Eigen::Index i = 0; i < eval_.size(); ++i) c(i) *= g(eval_(i));
  return (V_ * c).cwiseQuotient(sqrt_mass_.cast<Complex>());
}

ComplexMatrix matrix_function(const ComplexMatrix& L, const ScalarFunction& g) {
  return FunctionalCalculus(L)(g);
}

}  // namespace pell
