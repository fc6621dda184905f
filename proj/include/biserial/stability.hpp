#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "biserial/components.hpp"
#include "biserial/endo.hpp"
#include "biserial/errors.hpp"
#include "biserial/fp.hpp"
#include "biserial/hom.hpp"
#include "biserial/matrix.hpp"
#include "biserial/quiver.hpp"
#include "biserial/rational.hpp"
#include "biserial/representation.hpp"
#include "biserial/rng.hpp"
#include "biserial/strings.hpp"

namespace biserial {

struct SubrepOptions {
  // Cap on the number of vertex-subspace tuples examined by the exhaustive
  // subrepresentation scan.
  long long max_tuples = 2'000'000;
};

enum class StabilityStatus { Unstable, SemistableNotStable, Stable };

struct StabilityVerdict {
  StabilityStatus status;
  // Dimension vector of a subrepresentation realizing the violation
  // (unstable) or the zero pairing (semistable but not stable); absent only
  // for stable verdicts.
  std::optional<DimVector> witness;
  // Set when the configured primes disagreed; the reported status comes from
  // the smallest usable prime.
  bool field_sensitive = false;
  std::vector<std::string> notes;
};

struct StabilityOptions {
  std::vector<long long> primes{2, 3, 5};
  SubrepOptions subrep;
};

namespace detail {

/// Number of k-dimensional subspaces of F_q^n.
inline Int gaussian_binomial(long long n, long long k, long long q) {
  Int num = 1, den = 1, qq = q;
  for (long long i = 0; i < k; ++i) {
    Int qn = 1, qd = 1;
    for (long long e = 0; e < n - i; ++e) qn *= qq;
    for (long long e = 0; e < i + 1; ++e) qd *= qq;
    num *= qn - 1;
    den *= qd - 1;
  }
  return num / den;
}

/// One subspace of F_q^n stored as reduced echelon rows with their pivots.
struct Subspace {
  std::vector<std::vector<Fp>> rows;
  std::vector<long long> pivots;
};

/// Reduces y against the echelon rows in place; y lands at zero exactly when
/// it lies in the subspace.
inline bool contains(const Subspace& s, std::vector<Fp>& y) {
  for (std::size_t r = 0; r < s.rows.size(); ++r) {
    Fp c = y[static_cast<std::size_t>(s.pivots[r])];
    if (c.is_zero()) continue;
    for (std::size_t j = 0; j < y.size(); ++j) y[j] -= c * s.rows[r][j];
  }
  for (const Fp& x : y)
    if (!x.is_zero()) return false;
  return true;
}

inline std::vector<Subspace> all_subspaces(long long n, FieldCtx<Fp> ctx) {
  std::vector<Subspace> out;
  out.push_back(Subspace{});  // the zero subspace
  std::vector<long long> piv;
  auto emit = [&]() {
    long long k = static_cast<long long>(piv.size());
    std::vector<std::pair<long long, long long>> free_slots;  // (row, col)
    for (long long r = 0; r < k; ++r)
      for (long long c = piv[static_cast<std::size_t>(r)] + 1; c < n; ++c) {
        bool is_pivot = false;
        for (long long pc : piv) is_pivot = is_pivot || pc == c;
        if (!is_pivot) free_slots.emplace_back(r, c);
      }
    std::vector<long long> digits(free_slots.size(), 0);
    while (true) {
      Subspace s;
      s.pivots = piv;
      s.rows.assign(static_cast<std::size_t>(k),
                    std::vector<Fp>(static_cast<std::size_t>(n), ctx.zero()));
      for (long long r = 0; r < k; ++r)
        s.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(piv[static_cast<std::size_t>(r)])] =
            ctx.one();
      for (std::size_t i = 0; i < free_slots.size(); ++i)
        s.rows[static_cast<std::size_t>(free_slots[i].first)]
              [static_cast<std::size_t>(free_slots[i].second)] = ctx.from_int(digits[i]);
      out.push_back(std::move(s));
      std::size_t pos = 0;
      while (pos < digits.size() && digits[pos] == ctx.p - 1) digits[pos++] = 0;
      if (pos == digits.size()) break;
      ++digits[pos];
    }
  };
  auto choose = [&](auto&& self, long long next) -> void {
    if (!piv.empty()) emit();
    for (long long c = next; c < n; ++c) {
      piv.push_back(c);
      self(self, c + 1);
      piv.pop_back();
    }
  };
  choose(choose, 0);
  return out;
}

}  // namespace detail

/// Exact set of dimension vectors of subrepresentations of a module over a
/// prime field: every tuple of vertex subspaces closed under all arrow maps.
/// Always contains the zero vector and the full dimension vector.
inline std::set<DimVector> subrep_dim_vectors(const Representation<Fp>& m,
                                              const SubrepOptions& opts = {}) {
  const Quiver& q = m.quiver();
  FieldCtx<Fp> ctx = m.ctx();

  Int tuples = 1;
  for (const auto& [v, n] : m.dim()) {
    Int count = 0;
    for (long long k = 0; k <= n; ++k) count += detail::gaussian_binomial(n, k, ctx.p);
    tuples *= count;
  }
  if (tuples > Int(opts.max_tuples))
    throw BudgetExceeded("subrepresentation scan would examine " + tuples.str() +
                         " subspace tuples");

  std::vector<std::string> verts = q.vertices();
  std::vector<std::vector<detail::Subspace>> spaces;
  for (const std::string& v : verts) spaces.push_back(detail::all_subspaces(m.dim_at(v), ctx));

  std::map<std::string, std::size_t> vindex;
  for (std::size_t i = 0; i < verts.size(); ++i) vindex[verts[i]] = i;

  std::set<DimVector> out;
  std::vector<std::size_t> pick(verts.size(), 0);
  while (true) {
    bool closed = true;
    for (const Arrow& a : q.arrows()) {
      const detail::Subspace& src = spaces[vindex.at(a.tail)][pick[vindex.at(a.tail)]];
      const detail::Subspace& dst = spaces[vindex.at(a.head)][pick[vindex.at(a.head)]];
      const Matrix<Fp>& mat = m.mat(a.id);
      for (const std::vector<Fp>& row : src.rows) {
        std::vector<Fp> y(mat.rows(), ctx.zero());
        for (std::size_t i = 0; i < mat.rows(); ++i) {
          Fp acc = ctx.zero();
          for (std::size_t j = 0; j < mat.cols(); ++j) acc += mat.at(i, j) * row[j];
          y[i] = acc;
        }
        if (!detail::contains(dst, y)) {
          closed = false;
          break;
        }
      }
      if (!closed) break;
    }
    if (closed) {
      DimVector d;
      for (std::size_t i = 0; i < verts.size(); ++i)
        d[verts[i]] = static_cast<long long>(spaces[i][pick[i]].rows.size());
      out.insert(std::move(d));
    }
    std::size_t pos = 0;
    while (pos < pick.size() && pick[pos] + 1 == spaces[pos].size()) pick[pos++] = 0;
    if (pos == pick.size()) break;
    ++pick[pos];
  }
  return out;
}

namespace detail {

/// Reduction of a rational module at a prime: denominators are cleared per
/// arrow (a scaling, harmless for monomial relations and for the subspace
/// lattice), and the prime is rejected when any matrix drops rank.
inline std::optional<Representation<Fp>> reduce_mod_prime(const Representation<Rat>& m,
                                                          long long p) {
  FieldCtx<Fp> ctx(p);
  std::map<std::string, Matrix<Fp>> mats;
  for (const Arrow& a : m.quiver().arrows()) {
    const Matrix<Rat>& src = m.mat(a.id);
    Int scale = 1;
    for (std::size_t i = 0; i < src.rows(); ++i)
      for (std::size_t j = 0; j < src.cols(); ++j)
        scale = boost::multiprecision::lcm(scale, rat_den(src.at(i, j)));
    Matrix<Fp> dst(src.rows(), src.cols(), ctx);
    for (std::size_t i = 0; i < src.rows(); ++i)
      for (std::size_t j = 0; j < src.cols(); ++j) {
        Int entry = rat_num(src.at(i, j)) * (scale / rat_den(src.at(i, j)));
        Int residue = entry % p;
        dst.at(i, j) = ctx.from_int(residue.convert_to<long long>());
      }
    if (static_cast<long long>(rank(dst)) != static_cast<long long>(rank(src)))
      return std::nullopt;
    mats.emplace(a.id, std::move(dst));
  }
  return Representation<Fp>(m.algebra(), m.dim(), mats, ctx);
}

struct PrimeVerdict {
  StabilityStatus status;
  std::optional<DimVector> witness;
};

inline PrimeVerdict classify_subreps(const std::set<DimVector>& subs, const Weight& theta,
                                     const DimVector& full) {
  std::optional<DimVector> zero_witness, positive_witness;
  long long best = 0;
  bool any_proper = false;
  for (const DimVector& s : subs) {
    bool is_zero_vec = true, is_full = true;
    for (const auto& [v, n] : s) {
      is_zero_vec = is_zero_vec && n == 0;
      is_full = is_full && n == full.at(v);
    }
    if (is_zero_vec || is_full) continue;
    any_proper = true;
    long long t = theta_pairing(theta, s);
    if (t > best || (t > 0 && !positive_witness)) {
      best = t;
      positive_witness = s;
    }
    if (t == 0 && !zero_witness) zero_witness = s;
  }
  (void)any_proper;
  if (positive_witness && best > 0) return {StabilityStatus::Unstable, positive_witness};
  if (zero_witness) return {StabilityStatus::SemistableNotStable, zero_witness};
  return {StabilityStatus::Stable, std::nullopt};
}

inline std::string status_name(StabilityStatus s) {
  switch (s) {
    case StabilityStatus::Unstable:
      return "unstable";
    case StabilityStatus::SemistableNotStable:
      return "semistable_not_stable";
    case StabilityStatus::Stable:
      return "stable";
  }
  return "?";
}

}  // namespace detail

/// King's inequality test by exhaustive subrepresentation enumeration over
/// the configured primes. Verdicts must agree across primes; a disagreement
/// is flagged rather than hidden, and the smallest usable prime decides.
inline StabilityVerdict check_stability(const Representation<Rat>& m, const Weight& theta,
                                        const StabilityOptions& opts = {}) {
  validate_weight(m.quiver(), theta);
  long long t0 = theta_pairing(theta, m.dim());
  if (t0 > 0) {
    StabilityVerdict v{StabilityStatus::Unstable, m.dim(), false, {}};
    v.notes.push_back("the weight is already positive on the full module");
    return v;
  }
  if (t0 < 0)
    throw ThetaMismatch("weight pairs to " + std::to_string(t0) +
                        " on the module dimension vector; semistability requires zero");

  std::vector<std::pair<long long, detail::PrimeVerdict>> verdicts;
  std::vector<std::string> notes;
  for (long long p : opts.primes) {
    std::optional<Representation<Fp>> red = detail::reduce_mod_prime(m, p);
    if (!red) {
      notes.push_back("prime " + std::to_string(p) + " skipped (reduction drops rank)");
      continue;
    }
    std::set<DimVector> subs = subrep_dim_vectors(*red, opts.subrep);
    verdicts.emplace_back(p, detail::classify_subreps(subs, theta, m.dim()));
  }
  if (verdicts.empty())
    throw DomainError("no usable prime for stability testing; every reduction dropped rank");

  StabilityVerdict out{verdicts.front().second.status, verdicts.front().second.witness, false,
                       std::move(notes)};
  for (std::size_t i = 1; i < verdicts.size(); ++i) {
    if (verdicts[i].second.status != out.status) {
      out.field_sensitive = true;
      out.notes.push_back("prime " + std::to_string(verdicts[i].first) + " reports " +
                          detail::status_name(verdicts[i].second.status) + " but prime " +
                          std::to_string(verdicts.front().first) + " reports " +
                          detail::status_name(out.status));
    }
  }
  if (out.status == StabilityStatus::Stable && end_ring(m).dimension() != 1)
    throw DomainError("stable verdict contradicts an endomorphism algebra of dimension > 1");
  return out;
}

/// One factor of a θ-stable decomposition: a band family (a projective line
/// of stable modules) or the closure of a single stable orbit.
struct DecompositionFactor {
  enum class Kind { BandFamily, OrbitClosure };
  Kind kind;
  long long multiplicity;
  DimVector dim;          // dimension vector of one point of the factor
  RankSequence rank_seq;  // rank sequence of the factor's component
  std::optional<BandWord> band;
  std::vector<Rat> lambdas;  // parameters of the sampled summands in this family
  std::optional<Representation<Rat>> representative;
  std::string label;
};

struct ThetaStableDecomposition {
  std::vector<DecompositionFactor> factors;
};

namespace detail {

/// A rationally irreducible piece whose endomorphisms form a field of degree
/// k splits into k conjugate band modules after extending scalars. This
/// searches for the band word behind that orbit and returns a split model:
/// the same word at k distinct rational parameters. The model is accepted
/// only when its rank sequence and endomorphism dimension match the piece
/// and no homomorphisms connect the two, so a wrong guess cannot slip
/// through.
inline std::optional<std::pair<BandWord, std::vector<Rat>>> split_band_model(
    const Representation<Rat>& piece, long long k) {
  if (k < 2 || piece.total_dim() % k != 0) return std::nullopt;
  DimVector unit;
  for (const auto& [v, n] : piece.dim()) {
    if (n % k != 0) return std::nullopt;
    unit[v] = n / k;
  }
  std::vector<Rat> params;
  for (long long i = 1; i <= k; ++i) params.push_back(make_rat(i));
  for (const BandWord& w : enumerate_bands(piece.algebra(), piece.total_dim() / k)) {
    if (w.dim_vector() != unit) continue;
    Representation<Rat> model = band_module(w, params[0]);
    for (long long i = 1; i < k; ++i) model = direct_sum(model, band_module(w, params[i]));
    if (rank_sequence_of(model) != rank_sequence_of(piece)) continue;
    if (end_ring(model).dimension() != k) continue;
    if (!hom_basis(model, piece).empty() || !hom_basis(piece, model).empty()) continue;
    return std::make_pair(w, params);
  }
  return std::nullopt;
}

}  // namespace detail

/// Reads the θ-stable decomposition off a generic point: sample, decompose,
/// identify each summand, and group band summands sharing a word into one
/// family. A summand that resists rational splitting is matched to a split
/// band model at rational parameters, since only a conjugate band orbit
/// produces that behavior here. The point is semistable exactly when every
/// summand carries weight zero and none is unstable; every factor must then
/// be stable on its own. Anything outside that engineered situation errors
/// loudly.
inline ThetaStableDecomposition theta_stable_decomposition(const ComponentDescriptor& c,
                                                           const Weight& theta,
                                                           std::uint64_t seed = kDefaultSeed,
                                                           const StabilityOptions& opts = {}) {
  validate_weight(c.algebra->quiver(), theta);
  if (theta_pairing(theta, c.d) != 0)
    throw ThetaMismatch("weight must pair to zero on the component dimension vector");

  Rng rng(seed);
  Representation<Rat> sample = sample_generic(c, rng.fork(1));
  PartialSummandList summands = decompose_partial(sample, rng.fork(2));

  ThetaStableDecomposition out;
  std::map<std::string, std::size_t> family_index;
  auto add_family = [&](const BandWord& w, const std::vector<Rat>& lambdas, long long count) {
    Representation<Rat> one = band_module(w, lambdas.front());
    std::string key = word_to_string(w.letters());
    auto it = family_index.find(key);
    if (it == family_index.end()) {
      DecompositionFactor f;
      f.kind = DecompositionFactor::Kind::BandFamily;
      f.multiplicity = count;
      f.dim = one.dim();
      f.rank_seq = rank_sequence_of(one);
      f.band = w;
      f.lambdas = lambdas;
      f.label = "band family " + key;
      family_index[key] = out.factors.size();
      out.factors.push_back(std::move(f));
    } else {
      out.factors[it->second].multiplicity += count;
      for (const Rat& l : lambdas) out.factors[it->second].lambdas.push_back(l);
    }
  };

  for (const PartialSummand& s : summands) {
    if (!s.certified) {
      long long k = end_ring(s.rep).dimension();
      auto model = detail::split_band_model(s.rep, k);
      if (!model)
        throw DomainError(
            "a summand admits no rational splitting and matches no split band model");
      add_family(model->first, model->second, k * s.multiplicity);
      continue;
    }
    Identification id = identify(s.rep, c.algebra, rng.fork(3));
    if (id.kind == Identification::Kind::Band && id.mult == 1) {
      add_family(*id.band, {id.lambda}, s.multiplicity);
    } else {
      DecompositionFactor f;
      f.kind = DecompositionFactor::Kind::OrbitClosure;
      f.multiplicity = s.multiplicity;
      f.dim = s.rep.dim();
      f.rank_seq = rank_sequence_of(s.rep);
      f.representative = s.rep;
      f.label = identification_to_string(id);
      out.factors.push_back(std::move(f));
    }
  }

  // Weight-zero summands and per-factor stability. A summand of nonzero
  // weight forces a positive-weight summand somewhere, destabilizing the
  // point; so does a summand that is unstable outright.
  for (const DecompositionFactor& f : out.factors) {
    if (theta_pairing(theta, f.dim) != 0)
      throw GenericPointUnstable("summand " + f.label +
                                 " has nonzero weight; the generic point is unstable");
    Representation<Rat> first = f.kind == DecompositionFactor::Kind::BandFamily
                                    ? band_module(*f.band, f.lambdas.front())
                                    : *f.representative;
    StabilityVerdict sv = check_stability(first, theta, opts);
    if (sv.status == StabilityStatus::Unstable)
      throw GenericPointUnstable("summand " + f.label + " is unstable");
    if (sv.status != StabilityStatus::Stable)
      throw SummandNotStable("summand " + f.label + " is " + detail::status_name(sv.status));

    // Stability is open along a band family; a second parameter guards
    // against an unlucky first draw.
    if (f.kind == DecompositionFactor::Kind::BandFamily) {
      Rat second = make_rat(1);
      bool taken = true;
      while (taken) {
        second = second + Rat(1);
        taken = false;
        for (const Rat& l : f.lambdas) taken = taken || l == second;
      }
      StabilityVerdict sv2 = check_stability(band_module(*f.band, second), theta, opts);
      if (sv2.status != StabilityStatus::Stable)
        throw SummandNotStable(f.label + " fails stability at a second parameter");
    }
  }

  // Distinct stable factors of equal slope admit no homomorphisms either
  // way; the factor list must also add up to the component dimension vector.
  std::vector<Representation<Rat>> reps;
  for (const DecompositionFactor& f : out.factors)
    reps.push_back(f.kind == DecompositionFactor::Kind::BandFamily
                       ? band_module(*f.band, f.lambdas.front())
                       : *f.representative);
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (std::size_t j = 0; j < reps.size(); ++j)
      if (i != j && !hom_basis(reps[i], reps[j]).empty())
        throw DomainError("decomposition factors admit homomorphisms; not a valid "
                          "theta-stable decomposition");
  DimVector total;
  for (const std::string& v : c.algebra->quiver().vertices()) total[v] = 0;
  for (const DecompositionFactor& f : out.factors)
    for (const auto& [v, n] : f.dim) total[v] += f.multiplicity * n;
  if (total != c.d)
    throw DomainError("decomposition factors do not add up to the component dimension");
  return out;
}

/// Shape of the moduli space attached to one component: a product of
/// projective spaces, one exponent per surviving band family. The factors of
/// the underlying decomposition ride along for reporting.
struct ModuliStructure {
  bool computed = true;
  std::vector<long long> exponents;
  std::string note;
  std::vector<DecompositionFactor> factors;

  long long dimension() const {
    long long d = 0;
    for (long long e : exponents) d += e;
    return d;
  }

  std::string render() const {
    if (!computed) return note;
    if (exponents.empty()) return "point";
    std::string s;
    for (std::size_t i = 0; i < exponents.size(); ++i) {
      if (i > 0) s += " x ";
      s += "P^" + std::to_string(exponents[i]);
    }
    return s;
  }
};

/// Full pipeline over all components of the representation variety: the
/// θ-stable decomposition of each component, orbit-closure factors dropped,
/// every band family contributing one projective-space factor.
inline std::vector<std::pair<ComponentDescriptor, ModuliStructure>> moduli_structure(
    std::shared_ptr<const BoundQuiver> algebra, const DimVector& d, const Weight& theta,
    std::uint64_t seed = kDefaultSeed, const StabilityOptions& opts = {}) {
  std::shared_ptr<const BoundQuiver> cg = algebra;
  std::set<std::string> zero_arrows;
  if (!check_complete_gentle(*algebra)) {
    auto completed = completion_with_zero_set(*algebra);
    cg = completed.first;
    zero_arrows = completed.second;
  }
  validate_weight(cg->quiver(), theta);
  if (theta_pairing(theta, d) != 0)
    throw ThetaMismatch("weight must pair to zero on the dimension vector");

  Rng rng(seed);
  std::vector<std::pair<ComponentDescriptor, ModuliStructure>> out;
  std::vector<ComponentDescriptor> comps = components(cg, zero_arrows, d);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    ModuliStructure ms;
    try {
      ThetaStableDecomposition tsd =
          theta_stable_decomposition(comps[i], theta, rng.fork(i), opts);
      ms.factors = std::move(tsd.factors);
      for (const DecompositionFactor& f : ms.factors)
        if (f.kind == DecompositionFactor::Kind::BandFamily)
          ms.exponents.push_back(f.multiplicity);
      std::sort(ms.exponents.rbegin(), ms.exponents.rend());
    } catch (const GenericPointUnstable&) {
      ms.computed = false;
      ms.note = "not computed (generic point unstable)";
    }
    out.emplace_back(comps[i], std::move(ms));
  }
  return out;
}

}  // namespace biserial
