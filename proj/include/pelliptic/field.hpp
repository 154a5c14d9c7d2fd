#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pelliptic/ellipticity.hpp"
#include "pelliptic/grid.hpp"
#include "pelliptic/holder.hpp"

namespace pell {

struct MatrixField {
  std::string grid_id;
  int d = 1;
  std::vector<ComplexMatrix> cells;  // empty matrix on inactive cells

  static MatrixField constant(const GridDomain& g, const ComplexMatrix& a);
  static MatrixField from_function(const GridDomain& g,
                                   const std::function<ComplexMatrix(double, double)>& f);

  void validate(const GridDomain& g) const;
  double lambda() const;
  double Lambda() const;
  double delta(double p) const;
  MatrixField scaled(double s) const;
};

struct StarItem {
  std::string name;
  double exponent;
  double value;
  bool pass;
};

struct StarReport {
  std::vector<StarItem> items;
  bool pass = false;
  bool max_elliptic = false;  // stronger max{p,q,r}-ellipticity used for general domains
  double max_delta_A = 0, max_delta_B = 0, max_delta_C = 0;
};

StarReport star_conditions(const MatrixField& A, const MatrixField& B, const MatrixField& C,
                           const HolderTriple& t);
StarReport star_conditions(const ComplexMatrix& A, const ComplexMatrix& B, const ComplexMatrix& C,
                           const HolderTriple& t);

}  // namespace pell
