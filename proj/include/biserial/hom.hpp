#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "matrix.hpp"
#include "representation.hpp"

namespace biserial {

/// A homomorphism between representations: one matrix per vertex, the map at
/// v sending X_v into Y_v, commuting with every arrow action.
template <class K>
using VertexMaps = std::map<std::string, Matrix<K>>;

namespace detail {

/// Column offsets of the flattened unknowns (phi_v entries, row-major) in the
/// intertwining system, plus the total unknown count.
template <class K>
std::pair<std::map<std::string, std::size_t>, std::size_t> hom_offsets(
    const Representation<K>& x, const Representation<K>& y) {
  std::map<std::string, std::size_t> offset;
  std::size_t total = 0;
  for (const std::string& v : x.quiver().vertices()) {
    offset[v] = total;
    total += static_cast<std::size_t>(x.dim_at(v)) * static_cast<std::size_t>(y.dim_at(v));
  }
  return {offset, total};
}

/// Coefficient matrix of phi_{ha} X(a) = Y(a) phi_{ta} over all arrows.
/// One equation row per arrow and entry (p, q) of the product shape
/// d_Y(ha) x d_X(ta).
template <class K>
Matrix<K> intertwining_system(const Representation<K>& x, const Representation<K>& y) {
  if (!(*x.algebra() == *y.algebra()))
    throw std::invalid_argument("hom: representations of different algebras");
  auto [offset, total] = hom_offsets(x, y);
  std::size_t rows = 0;
  for (const Arrow& a : x.quiver().arrows())
    rows += static_cast<std::size_t>(y.dim_at(a.head)) *
            static_cast<std::size_t>(x.dim_at(a.tail));
  Matrix<K> sys(rows, total, x.ctx());
  std::size_t row = 0;
  for (const Arrow& a : x.quiver().arrows()) {
    const Matrix<K>& xa = x.mat(a.id);
    const Matrix<K>& ya = y.mat(a.id);
    const auto dx_tail = static_cast<std::size_t>(x.dim_at(a.tail));
    const auto dx_head = static_cast<std::size_t>(x.dim_at(a.head));
    const auto dy_tail = static_cast<std::size_t>(y.dim_at(a.tail));
    const auto dy_head = static_cast<std::size_t>(y.dim_at(a.head));
    for (std::size_t p = 0; p < dy_head; ++p)
      for (std::size_t q = 0; q < dx_tail; ++q) {
        // phi_{ha}[p][j] * X(a)[j][q] contributes X(a)[j][q]
        for (std::size_t j = 0; j < dx_head; ++j)
          sys.at(row, offset[a.head] + p * dx_head + j) =
              sys.at(row, offset[a.head] + p * dx_head + j) + xa.at(j, q);
        // -Y(a)[p][i] * phi_{ta}[i][q]
        for (std::size_t i = 0; i < dy_tail; ++i)
          sys.at(row, offset[a.tail] + i * dx_tail + q) =
              sys.at(row, offset[a.tail] + i * dx_tail + q) - ya.at(p, i);
        ++row;
      }
  }
  return sys;
}

}  // namespace detail

/// dim Hom(X, Y), computed exactly from the intertwining system.
template <class K>
long long hom_dim(const Representation<K>& x, const Representation<K>& y) {
  const Matrix<K> sys = detail::intertwining_system(x, y);
  return static_cast<long long>(sys.cols()) - static_cast<long long>(rank(sys));
}

/// Basis of Hom(X, Y) as vertex-indexed matrix tuples.
template <class K>
std::vector<VertexMaps<K>> hom_basis(const Representation<K>& x,
                                     const Representation<K>& y) {
  const Matrix<K> sys = detail::intertwining_system(x, y);
  auto [offset, total] = detail::hom_offsets(x, y);
  (void)total;
  std::vector<VertexMaps<K>> basis;
  for (const std::vector<K>& vec : nullspace(sys)) {
    VertexMaps<K> phi;
    for (const std::string& v : x.quiver().vertices()) {
      const auto dx = static_cast<std::size_t>(x.dim_at(v));
      const auto dy = static_cast<std::size_t>(y.dim_at(v));
      Matrix<K> m(dy, dx, x.ctx());
      for (std::size_t i = 0; i < dy; ++i)
        for (std::size_t j = 0; j < dx; ++j) m.at(i, j) = vec[offset[v] + i * dx + j];
      phi.emplace(v, std::move(m));
    }
    basis.push_back(std::move(phi));
  }
  return basis;
}

/// Checks that phi intertwines X and Y (used to cross-check solver output).
template <class K>
bool is_hom(const Representation<K>& x, const Representation<K>& y,
            const VertexMaps<K>& phi) {
  for (const Arrow& a : x.quiver().arrows())
    if (!(phi.at(a.head) * x.mat(a.id) == y.mat(a.id) * phi.at(a.tail))) return false;
  return true;
}

}  // namespace biserial
