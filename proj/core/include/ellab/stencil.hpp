#pragma once

#include <array>
#include <vector>

#include <Eigen/SparseCore>

#include "ellab/field.hpp"

namespace ellab {

// 5-point Laplacian on the unknown (non-Dirichlet) nodes of a field: node
// numbering of the unknowns and their (mirrored / wrapped) neighbours.
struct Stencil {
  int nx = 0;
  int ny = 0;
  double inv_h2 = 0.0;
  std::vector<int> unknown_of;  // node -> unknown index, -1 for Dirichlet nodes
  std::vector<int> node_of;     // unknown -> node
  std::vector<std::array<int, 4>> neighbours;

  explicit Stencil(const Field& u) : nx(u.nx()), ny(u.ny()), inv_h2(1.0 / (u.grid().h * u.grid().h)) {
    const auto& bc = u.boundary();
    unknown_of.assign(static_cast<std::size_t>(nx) * ny, -1);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j)
        if (!u.is_fixed(i, j)) {
          unknown_of[static_cast<std::size_t>(i) * ny + j] = static_cast<int>(node_of.size());
          node_of.push_back(i * ny + j);
        }
    auto step = [](int k, int d, int n, AxisKind kind) {
      int m = k + d;
      if (kind == AxisKind::periodic) return (m + n) % n;
      // Only Neumann far ends are reachable from an unknown node.
      if (m >= n) m = k - 1;
      return m;
    };
    neighbours.resize(node_of.size());
    for (std::size_t k = 0; k < node_of.size(); ++k) {
      const int i = node_of[k] / ny;
      const int j = node_of[k] % ny;
      neighbours[k] = {step(i, -1, nx, bc.x1) * ny + j, step(i, +1, nx, bc.x1) * ny + j,
                       i * ny + step(j, -1, ny, bc.x2), i * ny + step(j, +1, ny, bc.x2)};
    }
  }

  std::size_t size() const { return node_of.size(); }

  double laplacian(const std::vector<double>& v, std::size_t k) const {
    const auto& nb = neighbours[k];
    return (v[nb[0]] + v[nb[1]] + v[nb[2]] + v[nb[3]] - 4.0 * v[node_of[k]]) * inv_h2;
  }

  // Lap_h restricted to unknowns plus diag(shift); Dirichlet neighbours are
  // excluded (they go to the right-hand side via boundary_rhs).
  Eigen::SparseMatrix<double> matrix(const std::vector<double>& diag_shift) const {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(size() * 5);
    for (std::size_t k = 0; k < size(); ++k) {
      const int row = static_cast<int>(k);
      trip.emplace_back(row, row, -4.0 * inv_h2 + diag_shift[k]);
      for (int m : neighbours[k])
        if (unknown_of[m] >= 0) trip.emplace_back(row, unknown_of[m], inv_h2);
    }
    Eigen::SparseMatrix<double> A(static_cast<int>(size()), static_cast<int>(size()));
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    return A;
  }

  Eigen::VectorXd boundary_rhs(const std::vector<double>& v) const {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<int>(size()));
    for (std::size_t k = 0; k < size(); ++k)
      for (int m : neighbours[k])
        if (unknown_of[m] < 0) b[static_cast<int>(k)] += v[m] * inv_h2;
    return b;
  }
};

}  // namespace ellab
