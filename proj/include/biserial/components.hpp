#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "circular.hpp"
#include "errors.hpp"
#include "hom.hpp"
#include "quiver.hpp"
#include "representation.hpp"

namespace biserial {

/// Names one irreducible component of the representation variety: the ambient
/// algebra must carry the everywhere-two-in-two-out structure, zero_arrows
/// lists arrows forced to act by zero (cutting the variety down to a quotient
/// algebra), and r records the generic rank of every arrow.
struct ComponentDescriptor {
  std::shared_ptr<const BoundQuiver> algebra;
  std::set<std::string> zero_arrows;
  DimVector d;
  RankSequence r;
};

namespace detail {

/// One effective cycle of the algebra restricted to a dimension vector:
/// arrow names in application order, their tail dimensions as a cycle shape,
/// and which positions are forced to rank zero.
struct CycleProblem {
  std::vector<std::string> arrows;
  CycleShape shape;
  std::vector<bool> forced_zero;
};

inline std::vector<CycleProblem> cycle_problems(const BoundQuiver& algebra,
                                                const std::set<std::string>& zero_arrows,
                                                const DimVector& d) {
  std::vector<CycleProblem> problems;
  for (const std::vector<std::string>& cycle : effective_cycles(algebra)) {
    std::vector<long long> dims;
    std::vector<bool> forced;
    for (const std::string& id : cycle) {
      dims.push_back(d.at(algebra.quiver().arrow(id).tail));
      forced.push_back(zero_arrows.count(id) > 0);
    }
    problems.push_back(CycleProblem{cycle, CycleShape(std::move(dims)), std::move(forced)});
  }
  return problems;
}

/// Coordinatewise-maximal valid rank sequences among those vanishing at the
/// forced positions, sorted lexicographically.
inline std::vector<RankSeq> constrained_maximal_rank_sequences(
    const CycleShape& shape, const std::vector<bool>& forced_zero) {
  const std::size_t l = shape.length();
  std::vector<long long> box(l);
  for (std::size_t i = 0; i < l; ++i)
    box[i] = forced_zero[i] ? 0
                            : std::min(shape.at(static_cast<long long>(i)),
                                       shape.at(static_cast<long long>(i) + 1));
  std::vector<RankSeq> valid;
  RankSeq cur(l, 0);
  while (true) {
    if (is_rank_sequence(shape, cur)) valid.push_back(cur);
    std::size_t pos = 0;
    while (pos < l && cur[pos] == box[pos]) cur[pos++] = 0;
    if (pos == l) break;
    ++cur[pos];
  }
  std::vector<RankSeq> maximal;
  for (const RankSeq& a : valid) {
    bool dominated = false;
    for (const RankSeq& b : valid)
      if (!(a == b) && closure_leq(a, b)) { dominated = true; break; }
    if (!dominated) maximal.push_back(a);
  }
  std::sort(maximal.begin(), maximal.end());
  return maximal;
}

inline void require_complete_gentle(const BoundQuiver& algebra, const char* who) {
  if (algebra.kind() != QuiverKind::CompleteGentle)
    throw NotCompleteGentle(std::string(who) +
                            ": the ambient algebra must be complete gentle");
}

inline void validate_descriptor(const ComponentDescriptor& c, const char* who) {
  if (!c.algebra) throw std::invalid_argument(std::string(who) + ": null algebra");
  require_complete_gentle(*c.algebra, who);
  validate_dim_vector(c.algebra->quiver(), c.d);
  for (const std::string& z : c.zero_arrows)
    if (!c.algebra->quiver().has_arrow(z))
      throw std::invalid_argument(std::string(who) + ": unknown zero arrow " + z);
  for (const Arrow& a : c.algebra->quiver().arrows())
    if (!c.r.count(a.id))
      throw std::invalid_argument(std::string(who) + ": rank sequence misses arrow " + a.id);
  if (c.r.size() != c.algebra->quiver().arrows().size())
    throw std::invalid_argument(std::string(who) + ": rank sequence names unknown arrows");
  for (const CycleProblem& p : cycle_problems(*c.algebra, c.zero_arrows, c.d)) {
    RankSeq r;
    for (std::size_t i = 0; i < p.arrows.size(); ++i) {
      r.push_back(c.r.at(p.arrows[i]));
      if (p.forced_zero[i] && r.back() != 0)
        throw std::invalid_argument(std::string(who) + ": nonzero rank on zero arrow " +
                                    p.arrows[i]);
    }
    if (!is_rank_sequence(p.shape, r))
      throw std::invalid_argument(std::string(who) + ": invalid rank sequence on the cycle through " +
                                  p.arrows.front());
  }
}

}  // namespace detail

/// The irreducible components of the variety of d-dimensional modules over
/// algebra/(zero_arrows): one descriptor per choice of a maximal rank
/// sequence on each effective cycle, ordered lexicographically cycle by
/// cycle. Every arrow belongs to exactly one cycle, so the choices are
/// independent and the result is a full cartesian product.
inline std::vector<ComponentDescriptor> components(
    std::shared_ptr<const BoundQuiver> algebra, const std::set<std::string>& zero_arrows,
    const DimVector& d) {
  if (!algebra) throw std::invalid_argument("components: null algebra");
  detail::require_complete_gentle(*algebra, "components");
  validate_dim_vector(algebra->quiver(), d);
  for (const std::string& z : zero_arrows)
    if (!algebra->quiver().has_arrow(z))
      throw std::invalid_argument("components: unknown zero arrow " + z);
  const std::vector<detail::CycleProblem> problems =
      detail::cycle_problems(*algebra, zero_arrows, d);
  std::vector<std::vector<RankSeq>> choices;
  for (const detail::CycleProblem& p : problems)
    choices.push_back(detail::constrained_maximal_rank_sequences(p.shape, p.forced_zero));

  std::vector<ComponentDescriptor> out;
  std::vector<std::size_t> pick(problems.size(), 0);
  while (true) {
    ComponentDescriptor c{algebra, zero_arrows, d, {}};
    for (std::size_t k = 0; k < problems.size(); ++k)
      for (std::size_t i = 0; i < problems[k].arrows.size(); ++i)
        c.r[problems[k].arrows[i]] = choices[k][pick[k]][i];
    out.push_back(std::move(c));
    std::size_t pos = problems.size();
    while (pos > 0 && pick[pos - 1] + 1 == choices[pos - 1].size()) pick[--pos] = 0;
    if (pos == 0) break;
    ++pick[pos - 1];
  }
  return out;
}

/// Completes a gentle algebra and reports the added arrows as the zero set,
/// so the original module variety is the zero-arrow slice of the completed
/// one.
inline std::pair<std::shared_ptr<const BoundQuiver>, std::set<std::string>>
completion_with_zero_set(const BoundQuiver& gentle) {
  BoundQuiver closed = complete_gentle_closure(gentle);
  std::set<std::string> fresh;
  for (const Arrow& a : closed.quiver().arrows())
    if (!gentle.quiver().has_arrow(a.id)) fresh.insert(a.id);
  return {std::make_shared<const BoundQuiver>(std::move(closed)), std::move(fresh)};
}

/// Dimension of the component: the cycle dimensions add because the variety
/// is their product. Always at most the ambient sum of d(x)^2.
inline long long dim_component(const ComponentDescriptor& c) {
  detail::validate_descriptor(c, "dim_component");
  long long dim = 0;
  for (const detail::CycleProblem& p : detail::cycle_problems(*c.algebra, c.zero_arrows, c.d)) {
    RankSeq r;
    for (const std::string& id : p.arrows) r.push_back(c.r.at(id));
    dim += dim_comp(p.shape, r);
  }
  long long bound = 0;
  for (const auto& [v, n] : c.d) bound += n * n;
  if (dim > bound)
    throw std::logic_error("dim_component: dimension exceeds the ambient bound");
  return dim;
}

/// A general point of the component: per cycle, the normal form conjugated by
/// an independent random invertible matrix at every cycle position. The
/// composites stay zero and conjugation preserves each rank exactly; the
/// resampling loop guards the construction-level genericity checks.
inline Representation<Rat> sample_generic(const ComponentDescriptor& c, std::uint64_t seed) {
  detail::validate_descriptor(c, "sample_generic");
  const FieldCtx<Rat> ctx;
  const std::vector<detail::CycleProblem> problems =
      detail::cycle_problems(*c.algebra, c.zero_arrows, c.d);
  Rng rng(seed);
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::map<std::string, Matrix<Rat>> mats;
    for (const detail::CycleProblem& p : problems) {
      const std::size_t m = p.arrows.size();
      std::vector<Matrix<Rat>> h, hinv;
      for (std::size_t i = 0; i < m; ++i) {
        h.push_back(random_invertible(static_cast<std::size_t>(p.shape.at(
                                          static_cast<long long>(i))),
                                      rng));
        hinv.push_back(inverse(h.back()));
      }
      for (std::size_t i = 0; i < m; ++i) {
        const auto rows = static_cast<std::size_t>(p.shape.at(static_cast<long long>(i) + 1));
        const auto cols = static_cast<std::size_t>(p.shape.at(static_cast<long long>(i)));
        Matrix<Rat> block(rows, cols, ctx);
        const long long prev = c.r.at(p.arrows[(i + m - 1) % m]);
        for (long long k = 0; k < c.r.at(p.arrows[i]); ++k)
          block.at(static_cast<std::size_t>(k), static_cast<std::size_t>(prev + k)) = ctx.one();
        mats.emplace(p.arrows[i], h[(i + 1) % m] * block * hinv[i]);
      }
    }
    Representation<Rat> rep(c.algebra, c.d, std::move(mats), ctx);
    if (rank_sequence_of(rep) == c.r && check_relations(rep).ok) return rep;
  }
  throw DomainError("sample_generic: failed to realize the rank sequence generically");
}

/// Generic hom dimension between two components: the minimum of dim Hom over
/// independently sampled pairs. Semicontinuity makes any sampled value an
/// upper bound for the generic one, and the minimum over a few trials attains
/// it away from a measure-zero set.
inline long long generic_hom(const ComponentDescriptor& c1, const ComponentDescriptor& c2,
                             int trials, std::uint64_t seed) {
  if (!c1.algebra || !c2.algebra || !(*c1.algebra == *c2.algebra))
    throw std::invalid_argument("generic_hom: components of different algebras");
  if (trials < 1) throw std::invalid_argument("generic_hom: trials must be >= 1");
  Rng rng(seed);
  long long best = -1;
  for (int t = 0; t < trials; ++t) {
    const Representation<Rat> x = sample_generic(c1, rng.fork(2 * t));
    const Representation<Rat> y = sample_generic(c2, rng.fork(2 * t + 1));
    const long long h = hom_dim(x, y);
    best = best < 0 ? h : std::min(best, h);
  }
  return best;
}

}  // namespace biserial
