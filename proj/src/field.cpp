#include "pelliptic/field.hpp"

#include <algorithm>

namespace pell {

MatrixField MatrixField::constant(const GridDomain& g, const ComplexMatrix& a) {
  return from_function(g, [&](double, double) { return a; });
}

MatrixField MatrixField::from_function(const GridDomain& g,
                                       const std::function<ComplexMatrix(double, double)>& f) {
  MatrixField fld;
  fld.grid_id = g.id;
  fld.cells.resize(g.num_cells());
  bool first = true;
  for (int c = 0; c < g.num_cells(); ++c) {
    if (!g.is_active(c)) continue;
    auto x = g.cell_center(c);
    fld.cells[c] = f(x[0], x[1]);
    if (first) {
      fld.d = static_cast<int>(fld.cells[c].rows());
      first = false;
    }
  }
  fld.validate(g);
  return fld;
}

void MatrixField::validate(const GridDomain& g) const {
  if (grid_id != g.id) throw SchemaError("field refers to a different grid");
  if (static_cast<int>(cells.size()) != g.num_cells()) throw SchemaError("field size mismatch");
  for (int c = 0; c < g.num_cells(); ++c) {
    const auto& a = cells[c];
    if (g.is_active(c)) {
      if (a.rows() != d || a.cols() != d) throw SchemaError("field cell has wrong dimension");
      if (!all_finite(a)) throw SchemaError("field cell has non-finite entries");
    } else if (a.size() != 0) {
      throw SchemaError("inactive cell carries a matrix");
    }
  }
}

double MatrixField::lambda() const { return delta(2.0); }

double MatrixField::Lambda() const {
  double v = 0;
  for (const auto& a : cells)
    if (a.size()) v = std::max(v, Lambda_of(a));
  return v;
}

double MatrixField::delta(double p) const {
  double v = kInfinity;
  for (const auto& a : cells)
    if (a.size()) v = std::min(v, delta_p_exact(a, p).value);
  return v;
}

MatrixField MatrixField::scaled(double s) const {
  MatrixField out = *this;
  for (auto& a : out.cells)
    if (a.size()) a *= s;
  return out;
}

namespace {

StarReport star_from(const std::function<double(int, double)>& delta, const HolderTriple& t) {
  StarReport rep;
  const double p = t.p, q = t.q, r = t.r;
  rep.items = {{"A:p", p, delta(0, p), false},
               {"A:1+p/q", 1 + p / q, delta(0, 1 + p / q), false},
               {"B:q", q, delta(1, q), false},
               {"B:1+q/p", 1 + q / p, delta(1, 1 + q / p), false},
               {"C:r", r, delta(2, r), false}};
  rep.pass = true;
  for (auto& it : rep.items) {
    it.pass = it.value > 0;
    rep.pass = rep.pass && it.pass;
  }
  const double mx = t.max_exponent();
  rep.max_delta_A = delta(0, mx);
  rep.max_delta_B = delta(1, mx);
  rep.max_delta_C = delta(2, mx);
  rep.max_elliptic = rep.max_delta_A > 0 && rep.max_delta_B > 0 && rep.max_delta_C > 0;
  return rep;
}

}  // namespace

StarReport star_conditions(const MatrixField& A, const MatrixField& B, const MatrixField& C,
                           const HolderTriple& t) {
  if (A.grid_id != B.grid_id || A.grid_id != C.grid_id)
    throw SchemaError("star_conditions: fields live on different grids");
  if (A.d != B.d || A.d != C.d) throw SchemaError("star_conditions: matrix dimensions differ");
  const MatrixField* f[3] = {&A, &B, &C};
  return star_from([&](int k, double s) { return f[k]->delta(s); }, t);
}

StarReport star_conditions(const ComplexMatrix& A, const ComplexMatrix& B, const ComplexMatrix& C,
                           const HolderTriple& t) {
  if (A.rows() != B.rows() || A.rows() != C.rows())
    throw SchemaError("star_conditions: matrix dimensions differ");
  const ComplexMatrix* m[3] = {&A, &B, &C};
  return star_from([&](int k, double s) { return delta_p_exact(*m[k], s).value; }, t);
}

}  // namespace pell
