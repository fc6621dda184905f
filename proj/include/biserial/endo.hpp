#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "biserial/errors.hpp"
#include "biserial/hom.hpp"
#include "biserial/matrix.hpp"
#include "biserial/polynomial.hpp"
#include "biserial/representation.hpp"
#include "biserial/rng.hpp"

namespace biserial {

/// Basis of the endomorphism algebra of a representation. When the algebra is
/// nonzero the first element is the identity tuple.
struct EndBasis {
  std::vector<VertexMaps<Rat>> elements;

  long long dimension() const { return static_cast<long long>(elements.size()); }
};

struct Summand {
  Representation<Rat> rep;
  long long multiplicity;
};

/// Indecomposable summands with multiplicities; total dimension is preserved.
using SummandList = std::vector<Summand>;

struct IndecomposabilityResult {
  bool indecomposable;
  int probes;          // endomorphisms examined
  std::string detail;  // certificate note or splitting witness
};

inline EndBasis end_ring(const Representation<Rat>& m);

namespace detail {

inline VertexMaps<Rat> identity_endo(const Representation<Rat>& m) {
  VertexMaps<Rat> id;
  for (const auto& [v, n] : m.dim())
    id.emplace(v, Matrix<Rat>::identity(static_cast<std::size_t>(n), m.ctx()));
  return id;
}

inline std::vector<Rat> flatten_maps(const VertexMaps<Rat>& maps) {
  std::vector<Rat> out;
  for (const auto& [v, mat] : maps)
    for (std::size_t i = 0; i < mat.rows(); ++i)
      for (std::size_t j = 0; j < mat.cols(); ++j) out.push_back(mat.at(i, j));
  return out;
}

/// Greedy echelon filter: keeps the input elements whose flattenings are
/// linearly independent, in order. Row reduction happens on copies.
inline std::vector<VertexMaps<Rat>> independent_subset(
    const std::vector<VertexMaps<Rat>>& candidates) {
  std::vector<VertexMaps<Rat>> kept;
  std::vector<std::vector<Rat>> echelon;
  for (const VertexMaps<Rat>& cand : candidates) {
    std::vector<Rat> row = flatten_maps(cand);
    for (const std::vector<Rat>& e : echelon) {
      std::size_t lead = 0;
      while (lead < e.size() && is_zero(e[lead])) ++lead;
      if (lead == e.size() || is_zero(row[lead])) continue;
      Rat f = row[lead] / e[lead];
      for (std::size_t j = lead; j < row.size(); ++j) row[j] = row[j] - f * e[j];
    }
    bool nonzero = false;
    for (const Rat& x : row) {
      if (!is_zero(x)) {
        nonzero = true;
        break;
      }
    }
    if (!nonzero) continue;
    kept.push_back(cand);
    echelon.push_back(std::move(row));
  }
  return kept;
}

inline VertexMaps<Rat> combine_maps(const Representation<Rat>& m,
                                    const std::vector<VertexMaps<Rat>>& basis,
                                    const std::vector<Rat>& coeffs) {
  VertexMaps<Rat> out;
  for (const auto& [v, n] : m.dim())
    out.emplace(v, Matrix<Rat>(static_cast<std::size_t>(n), static_cast<std::size_t>(n), m.ctx()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (is_zero(coeffs[i])) continue;
    for (const auto& [v, mat] : basis[i]) {
      Matrix<Rat>& acc = out.at(v);
      for (std::size_t r = 0; r < mat.rows(); ++r)
        for (std::size_t c = 0; c < mat.cols(); ++c)
          acc.at(r, c) = acc.at(r, c) + coeffs[i] * mat.at(r, c);
    }
  }
  return out;
}

/// Random integer combination of basis elements, never the zero tuple.
inline VertexMaps<Rat> random_combination(const Representation<Rat>& m,
                                          const std::vector<VertexMaps<Rat>>& basis, Rng& rng) {
  for (int attempt = 0; attempt < 32; ++attempt) {
    std::vector<Rat> coeffs;
    bool any = false;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      long long c = rng.uniform(-3, 3);
      if (c != 0) any = true;
      coeffs.push_back(make_rat(c));
    }
    if (!any) continue;
    return combine_maps(m, basis, coeffs);
  }
  throw SplitInconclusive("random combination draws returned only the zero tuple");
}

inline Matrix<Rat> matrix_power(const Matrix<Rat>& m, long long n) {
  Matrix<Rat> acc = Matrix<Rat>::identity(m.rows(), m.ctx());
  for (long long i = 0; i < n; ++i) acc = acc * m;
  return acc;
}

/// Basis of the column space: the columns of m sitting at the pivot positions
/// of its reduced echelon form.
inline std::vector<std::vector<Rat>> column_space_basis(const Matrix<Rat>& m) {
  Matrix<Rat> copy = m;
  std::vector<std::size_t> pivots = rref_in_place(copy);
  std::vector<std::vector<Rat>> out;
  for (std::size_t p : pivots) {
    std::vector<Rat> col;
    for (std::size_t i = 0; i < m.rows(); ++i) col.push_back(m.at(i, p));
    out.push_back(std::move(col));
  }
  return out;
}

using SubspaceTuple = std::map<std::string, std::vector<std::vector<Rat>>>;

inline long long subspace_dim(const SubspaceTuple& u) {
  long long d = 0;
  for (const auto& [v, basis] : u) d += static_cast<long long>(basis.size());
  return d;
}

/// Restricts m to an invariant subspace given by per-vertex column bases.
/// Each arrow matrix is rewritten in the subspace coordinates; the defining
/// systems are consistent exactly when the tuple is invariant.
inline Representation<Rat> restrict_to_subspace(const Representation<Rat>& m,
                                                const SubspaceTuple& u) {
  DimVector d;
  std::map<std::string, Matrix<Rat>> embed;
  for (const auto& [v, n] : m.dim()) {
    auto it = u.find(v);
    std::size_t k = it == u.end() ? 0 : it->second.size();
    d[v] = static_cast<long long>(k);
    Matrix<Rat> b(static_cast<std::size_t>(n), k, m.ctx());
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i)
        b.at(i, j) = it->second[j][i];
    embed.emplace(v, std::move(b));
  }
  std::map<std::string, Matrix<Rat>> mats;
  for (const Arrow& arrow : m.quiver().arrows()) {
    const Matrix<Rat>& bt = embed.at(arrow.tail);
    const Matrix<Rat>& bh = embed.at(arrow.head);
    Matrix<Rat> restricted(bh.cols(), bt.cols(), m.ctx());
    for (std::size_t j = 0; j < bt.cols(); ++j) {
      std::vector<Rat> rhs(bh.rows(), m.ctx().zero());
      for (std::size_t i = 0; i < bh.rows(); ++i) {
        Rat acc = m.ctx().zero();
        for (std::size_t t = 0; t < bt.rows(); ++t)
          acc = acc + m.mat(arrow.id).at(i, t) * bt.at(t, j);
        rhs[i] = acc;
      }
      auto sol = solve_linear_system(bh, rhs);
      if (!sol) throw std::logic_error("restriction target is not invariant");
      for (std::size_t i = 0; i < bh.cols(); ++i) restricted.at(i, j) = sol->particular[i];
    }
    mats.emplace(arrow.id, std::move(restricted));
  }
  return Representation<Rat>(m.algebra(), d, mats, m.ctx());
}

/// Outcome of probing one random endomorphism: either a proper decomposition
/// of the carrier, or the observation that its characteristic polynomial is a
/// power of a single linear factor.
struct ProbeOutcome {
  std::vector<Representation<Rat>> parts;
  bool linear_power = false;
};

inline ProbeOutcome probe_endomorphism(const Representation<Rat>& m,
                                       const std::vector<VertexMaps<Rat>>& basis, Rng& rng) {
  ProbeOutcome out;
  VertexMaps<Rat> phi = random_combination(m, basis, rng);

  // Generalized kernels of the irreducible factors split the carrier into
  // invariant pieces; two or more distinct factors give a proper split.
  std::vector<Poly<Rat>> factors;
  std::map<std::string, SubspaceTuple> kernels;  // keyed by factor rendering
  for (const auto& [v, mat] : phi) {
    if (mat.rows() == 0) continue;
    for (const EigenBlock& blk : char_poly_factor_split(mat)) {
      std::string key = poly_to_string(blk.factor);
      if (kernels.find(key) == kernels.end()) {
        kernels.emplace(key, SubspaceTuple{});
        factors.push_back(blk.factor);
      }
      kernels.at(key)[v] = blk.kernel;
    }
  }
  if (kernels.size() >= 2) {
    for (const auto& [key, u] : kernels) out.parts.push_back(restrict_to_subspace(m, u));
    return out;
  }
  if (factors.size() == 1 && factors[0].degree() == 1) {
    out.linear_power = true;
    return out;
  }

  // Single irreducible factor of higher degree. The carrier cannot be
  // indecomposable here (local endomorphism algebras act with rational
  // residue in this setting), so hunt for a singular non-nilpotent
  // endomorphism: one killing a random vector. Its stable kernel and stable
  // image are invariant and complementary.
  std::vector<Rat> x;
  bool nonzero = false;
  for (const auto& [v, n] : m.dim())
    for (long long i = 0; i < n; ++i) {
      long long c = rng.uniform(-3, 3);
      if (c != 0) nonzero = true;
      x.push_back(make_rat(c));
    }
  if (!nonzero || basis.empty()) return out;

  std::size_t total = x.size();
  Matrix<Rat> sys(total, basis.size(), m.ctx());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    std::size_t row = 0, off = 0;
    for (const auto& [v, mat] : basis[i]) {
      for (std::size_t r = 0; r < mat.rows(); ++r) {
        Rat acc = m.ctx().zero();
        for (std::size_t c = 0; c < mat.cols(); ++c) acc = acc + mat.at(r, c) * x[off + c];
        sys.at(row++, i) = acc;
      }
      off += mat.cols();
    }
  }
  std::vector<std::vector<Rat>> killers = nullspace(sys);
  if (killers.empty()) return out;

  std::vector<Rat> coeffs(basis.size(), m.ctx().zero());
  bool any = false;
  for (const std::vector<Rat>& k : killers) {
    long long c = rng.uniform(-3, 3);
    if (c == 0) continue;
    any = true;
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] = coeffs[i] + make_rat(c) * k[i];
  }
  if (!any)
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] = killers[0][i];
  VertexMaps<Rat> psi = combine_maps(m, basis, coeffs);

  SubspaceTuple stable_kernel, stable_image;
  for (const auto& [v, mat] : psi) {
    Matrix<Rat> pw = matrix_power(mat, m.total_dim());
    stable_kernel[v] = nullspace(pw);
    stable_image[v] = column_space_basis(pw);
  }
  long long dk = subspace_dim(stable_kernel);
  if (dk == 0 || dk == m.total_dim()) return out;
  out.parts.push_back(restrict_to_subspace(m, stable_kernel));
  out.parts.push_back(restrict_to_subspace(m, stable_image));
  return out;
}

inline constexpr int kProbeCap = 64;

/// Splits m as far as the probes reach, certifying leaves by consecutive
/// probes whose characteristic polynomials are powers of one linear factor.
/// A leaf that resists both splitting and certification is kept with
/// certified = false instead of aborting the whole decomposition.
inline void decompose_into(const Representation<Rat>& m, Rng& rng, int certificate_probes,
                           std::vector<std::pair<Representation<Rat>, bool>>& out) {
  if (m.total_dim() == 0) return;
  EndBasis end = end_ring(m);
  if (end.dimension() == 1) {
    out.emplace_back(m, true);
    return;
  }
  int consecutive = 0;
  for (int attempt = 0; attempt < kProbeCap; ++attempt) {
    ProbeOutcome probe = probe_endomorphism(m, end.elements, rng);
    if (!probe.parts.empty()) {
      for (const Representation<Rat>& part : probe.parts)
        decompose_into(part, rng, certificate_probes, out);
      return;
    }
    if (probe.linear_power) {
      if (++consecutive >= certificate_probes) {
        out.emplace_back(m, true);
        return;
      }
    } else {
      consecutive = 0;
    }
  }
  out.emplace_back(m, false);
}

}  // namespace detail

/// Basis of End(m) as intertwining tuples. The identity leads the basis, so
/// callers can rely on elements[0] being the identity when the space is
/// nonzero.
inline EndBasis end_ring(const Representation<Rat>& m) {
  std::vector<VertexMaps<Rat>> candidates;
  if (m.total_dim() > 0) candidates.push_back(detail::identity_endo(m));
  for (VertexMaps<Rat>& h : hom_basis(m, m)) candidates.push_back(std::move(h));
  return EndBasis{detail::independent_subset(candidates)};
}

/// Tests isomorphism by hunting for an invertible intertwiner. Mismatched
/// dimension vectors or rank sequences settle the question immediately; the
/// random search has one-sided error (a "true" answer is exact).
inline bool is_isomorphic(const Representation<Rat>& a, const Representation<Rat>& b,
                          int trials = 8, std::uint64_t seed = kDefaultSeed) {
  if (!(*a.algebra() == *b.algebra()))
    throw std::invalid_argument("is_isomorphic: representations over different algebras");
  if (a.dim() != b.dim()) return false;
  if (rank_sequence_of(a) != rank_sequence_of(b)) return false;
  if (a.total_dim() == 0) return true;
  std::vector<VertexMaps<Rat>> homs = hom_basis(a, b);
  if (homs.empty()) return false;
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    VertexMaps<Rat> psi = detail::combine_maps(a, homs, [&] {
      std::vector<Rat> coeffs;
      for (std::size_t i = 0; i < homs.size(); ++i) coeffs.push_back(make_rat(rng.uniform(-3, 3)));
      return coeffs;
    }());
    bool invertible = true;
    for (const auto& [v, mat] : psi) {
      if (mat.rows() != mat.cols() || (mat.rows() > 0 && is_zero(det(mat)))) {
        invertible = false;
        break;
      }
    }
    if (invertible) return true;
  }
  return false;
}

/// One summand of a partial decomposition. An uncertified piece admitted no
/// further splitting over the rationals but could not be certified
/// indecomposable either; its endomorphism algebra has no rational
/// eigenvalues, the signature of scalars living in a proper field extension.
struct PartialSummand {
  Representation<Rat> rep;
  long long multiplicity;
  bool certified;
};

using PartialSummandList = std::vector<PartialSummand>;

/// Decomposes m as far as rational splittings reach, grouping isomorphic
/// pieces and ordering by dimension. Deterministic for a fixed seed.
inline PartialSummandList decompose_partial(const Representation<Rat>& m,
                                            std::uint64_t seed = kDefaultSeed) {
  Rng rng(seed);
  std::vector<std::pair<Representation<Rat>, bool>> pieces;
  detail::decompose_into(m, rng, 6, pieces);

  PartialSummandList grouped;
  for (auto& [piece, certified] : pieces) {
    bool merged = false;
    for (PartialSummand& s : grouped) {
      if (s.certified == certified && is_isomorphic(s.rep, piece, 8, rng.fork(grouped.size()))) {
        ++s.multiplicity;
        merged = true;
        break;
      }
    }
    if (!merged) grouped.push_back(PartialSummand{std::move(piece), 1, certified});
  }
  std::stable_sort(grouped.begin(), grouped.end(),
                   [](const PartialSummand& a, const PartialSummand& b) {
                     if (a.rep.total_dim() != b.rep.total_dim())
                       return a.rep.total_dim() < b.rep.total_dim();
                     return a.rep.dim() < b.rep.dim();
                   });
  return grouped;
}

/// Decomposes m into indecomposable summands with multiplicities, grouped up
/// to isomorphism and ordered by dimension. Deterministic for a fixed seed.
inline SummandList decompose(const Representation<Rat>& m, std::uint64_t seed = kDefaultSeed) {
  PartialSummandList partial = decompose_partial(m, seed);
  SummandList grouped;
  for (PartialSummand& s : partial) {
    if (!s.certified)
      throw SplitInconclusive(
          "no splitting found and indecomposability not certified within the probe cap");
    grouped.push_back(Summand{std::move(s.rep), s.multiplicity});
  }
  return grouped;
}

/// Probabilistic indecomposability test. A split found is a definite "no"
/// with the splitting dimensions as witness; the "yes" side reports how many
/// consecutive probes backed the certificate.
inline IndecomposabilityResult is_indecomposable(const Representation<Rat>& m,
                                                 std::uint64_t seed = kDefaultSeed,
                                                 int certificate_probes = 6) {
  if (m.total_dim() == 0)
    return {false, 0, "the zero representation has no indecomposable summands"};
  EndBasis end = end_ring(m);
  if (end.dimension() == 1)
    return {true, 0, "endomorphism algebra is one dimensional"};
  Rng rng(seed);
  int consecutive = 0;
  for (int attempt = 0; attempt < detail::kProbeCap; ++attempt) {
    detail::ProbeOutcome probe = detail::probe_endomorphism(m, end.elements, rng);
    if (!probe.parts.empty()) {
      std::ostringstream w;
      w << "splits into dimensions";
      for (const Representation<Rat>& part : probe.parts) w << ' ' << part.total_dim();
      return {false, attempt + 1, w.str()};
    }
    if (probe.linear_power) {
      if (++consecutive >= certificate_probes)
        return {true, attempt + 1,
                "consecutive probes all had characteristic polynomial a power of one linear factor"};
    } else {
      consecutive = 0;
    }
  }
  throw SplitInconclusive(
      "no splitting found and indecomposability not certified within the probe cap");
}

}  // namespace biserial
