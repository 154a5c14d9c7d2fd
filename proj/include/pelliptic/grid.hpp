#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pelliptic/types.hpp"

namespace pell {

// Cells are unit squares (or intervals) of side h; unknowns live on cell corners.
struct GridDomain {
  int dim = 1;
  int nx = 0, ny = 1;
  double h = 0;
  std::vector<std::uint8_t> active;
  std::string id;
  bool allow_disconnected = false;

  static GridDomain interval(int ncells, double length = 1.0);
  static GridDomain box(int nx, int ny, double length = 1.0);

  int num_cells() const { return nx * ny; }
  int nodes_x() const { return nx + 1; }
  int nodes_y() const { return dim == 1 ? 1 : ny + 1; }
  int num_nodes() const { return nodes_x() * nodes_y(); }
  int corners() const { return dim == 1 ? 2 : 4; }
  int num_active() const;
  bool is_active(int c) const { return active[c] != 0; }

  // corner k of cell c: bit 0 selects +x, bit 1 selects +y
  int corner_node(int c, int k) const;
  std::array<double, 2> node_position(int node) const;
  std::array<double, 2> cell_center(int c) const;
  // sides: 0 = -x, 1 = +x, 2 = -y, 3 = +y
  int neighbor(int c, int side) const;  // -1 when outside
  bool is_boundary_facet(int c, int side) const;
  std::array<double, 2> facet_midpoint(int c, int side) const;
  std::vector<int> facet_nodes(int c, int side) const;

  void validate() const;
};

enum class BCKind { Dirichlet, Neumann, Mixed };

struct BoundaryCondition {
  BCKind kind = BCKind::Dirichlet;
  // Mixed only: per (cell, side) flag, nonzero marks a facet of the Dirichlet part.
  std::vector<std::uint8_t> gamma;

  static BoundaryCondition dirichlet() { return {BCKind::Dirichlet, {}}; }
  static BoundaryCondition neumann() { return {BCKind::Neumann, {}}; }
  static BoundaryCondition mixed(const GridDomain& g,
                                 const std::function<bool(double, double)>& on_gamma);

  bool facet_dirichlet(const GridDomain& g, int c, int side) const;
  void validate(const GridDomain& g) const;
  std::string name() const;
};

BCKind parse_bc(const std::string& s);

}  // namespace pell
