#include "pelliptic/grid.hpp"

#include <queue>

namespace pell {

GridDomain GridDomain::interval(int ncells, double length) {
  if (ncells < 1 || !(length > 0)) throw SchemaError("interval grid needs cells and length");
  GridDomain g;
  g.dim = 1;
  g.nx = ncells;
  g.ny = 1;
  g.h = length / ncells;
  g.active.assign(ncells, 1);
  g.id = "interval-" + std::to_string(ncells);
  return g;
}

GridDomain GridDomain::box(int nx, int ny, double length) {
  if (nx < 1 || ny < 1 || !(length > 0)) throw SchemaError("box grid needs cells and length");
  GridDomain g;
  g.dim = 2;
  g.nx = nx;
  g.ny = ny;
  g.h = length / nx;
  g.active.assign(static_cast<std::size_t>(nx) * ny, 1);
  g.id = "box-" + std::to_string(nx) + "x" + std::to_string(ny);
  return g;
}

int GridDomain::num_active() const {
  int n = 0;
  for (auto a : active) n += a != 0;
  return n;
}

int GridDomain::corner_node(int c, int k) const {
  const int i = c % nx, j = c / nx;
  const int ni = i + (k & 1);
  const int nj = dim == 1 ? 0 : j + ((k >> 1) & 1);
  return ni + nodes_x() * nj;
}

std::array<double, 2> GridDomain::node_position(int node) const {
  return {h * (node % nodes_x()), h * (node / nodes_x())};
}

std::array<double, 2> GridDomain::cell_center(int c) const {
  return {h * (c % nx + 0.5), dim == 1 ? 0.0 : h * (c / nx + 0.5)};
}

int GridDomain::neighbor(int c, int side) const {
  const int i = c % nx, j = c / nx;
  switch (side) {
    case 0: return i > 0 ? c - 1 : -1;
    case 1: return i + 1 < nx ? c + 1 : -1;
    case 2: return (dim == 2 && j > 0) ? c - nx : -1;
    case 3: return (dim == 2 && j + 1 < ny) ? c + nx : -1;
  }
  return -1;
}

bool GridDomain::is_boundary_facet(int c, int side) const {
  if (!is_active(c)) return false;
  const int nb = neighbor(c, side);
  return nb < 0 || !is_active(nb);
}

std::array<double, 2> GridDomain::facet_midpoint(int c, int side) const {
  auto ctr = cell_center(c);
  const double half = 0.5 * h;
  switch (side) {
    case 0: ctr[0] -= half; break;
    case 1: ctr[0] += half; break;
    case 2: ctr[1] -= half; break;
    case 3: ctr[1] += half; break;
  }
  return ctr;
}

std::vector<int> GridDomain::facet_nodes(int c, int side) const {
  if (dim == 1) return {corner_node(c, side == 0 ? 0 : 1)};
  switch (side) {
    case 0: return {corner_node(c, 0), corner_node(c, 2)};
    case 1: return {corner_node(c, 1), corner_node(c, 3)};
    case 2: return {corner_node(c, 0), corner_node(c, 1)};
    default: return {corner_node(c, 2), corner_node(c, 3)};
  }
}

void GridDomain::validate() const {
  if (dim != 1 && dim != 2) throw SchemaError("grid dim must be 1 or 2");
  if (!(h > 0)) throw SchemaError("grid spacing must be positive");
  if (static_cast<int>(active.size()) != num_cells()) throw SchemaError("active mask size mismatch");
  const int na = num_active();
  if (na == 0) throw SchemaError("empty active set");
  if (allow_disconnected) return;
  std::vector<char> seen(num_cells(), 0);
  int start = 0;
  while (!is_active(start)) ++start;
  std::queue<int> todo;
  todo.push(start);
  seen[start] = 1;
  int count = 0;
  while (!todo.empty()) {
    const int c = todo.front();
    todo.pop();
    ++count;
    for (int s = 0; s < 2 * dim; ++s) {
      const int nb = neighbor(c, s);
      if (nb >= 0 && is_active(nb) && !seen[nb]) {
        seen[nb] = 1;
        todo.push(nb);
      }
    }
  }
  if (count != na) throw SchemaError("active region is disconnected");
}

BoundaryCondition BoundaryCondition::mixed(const GridDomain& g,
                                           const std::function<bool(double, double)>& on_gamma) {
  BoundaryCondition bc{BCKind::Mixed, std::vector<std::uint8_t>(g.num_cells() * 2 * g.dim, 0)};
  for (int c = 0; c < g.num_cells(); ++c)
    for (int s = 0; s < 2 * g.dim; ++s)
      if (g.is_boundary_facet(c, s)) {
        auto m = g.facet_midpoint(c, s);
        bc.gamma[c * 2 * g.dim + s] = on_gamma(m[0], m[1]) ? 1 : 0;
      }
  return bc;
}

bool BoundaryCondition::facet_dirichlet(const GridDomain& g, int c, int side) const {
  switch (kind) {
    case BCKind::Dirichlet: return true;
    case BCKind::Neumann: return false;
    case BCKind::Mixed: return gamma[c * 2 * g.dim + side] != 0;
  }
  return false;
}

void BoundaryCondition::validate(const GridDomain& g) const {
  if (kind != BCKind::Mixed) return;
  if (static_cast<int>(gamma.size()) != g.num_cells() * 2 * g.dim)
    throw SchemaError("mixed boundary labels have the wrong size");
  for (int c = 0; c < g.num_cells(); ++c)
    for (int s = 0; s < 2 * g.dim; ++s)
      if (gamma[c * 2 * g.dim + s] && !g.is_boundary_facet(c, s))
        throw SchemaError("boundary label on an interior facet");
}

std::string BoundaryCondition::name() const {
  switch (kind) {
    case BCKind::Dirichlet: return "dirichlet";
    case BCKind::Neumann: return "neumann";
    case BCKind::Mixed: return "mixed";
  }
  return "?";
}

BCKind parse_bc(const std::string& s) {
  if (s == "dirichlet") return BCKind::Dirichlet;
  if (s == "neumann") return BCKind::Neumann;
  if (s == "mixed") return BCKind::Mixed;
  throw SchemaError("unknown boundary condition: " + s);
}

}  // namespace pell
