#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "fp.hpp"
#include "matrix.hpp"
#include "quiver.hpp"
#include "representation.hpp"

namespace biserial {

/// Dimension data for a cyclic chain of maps composing to zero: vertices
/// indexed by Z/l, one map A_i of shape n_{i+1} x n_i along each arrow
/// a_i : i -> i+1, subject to A_{i+1} A_i = 0 for every i (l = 1 reads
/// A_0 A_0 = 0). Entries of n may be zero; zero positions carry empty
/// blocks through every construction below, which lets callers restrict an
/// arbitrary dimension vector to a cycle without special cases.
class CycleShape {
 public:
  explicit CycleShape(std::vector<long long> dims) : n_(std::move(dims)) {
    if (n_.empty()) throw std::invalid_argument("cycle shape: length must be >= 1");
    for (long long v : n_)
      if (v < 0) throw std::invalid_argument("cycle shape: dimensions must be >= 0");
  }

  std::size_t length() const { return n_.size(); }
  const std::vector<long long>& dims() const { return n_; }
  /// Cyclic access: any integer index, reduced mod the length.
  long long at(long long i) const {
    const auto l = static_cast<long long>(n_.size());
    return n_[static_cast<std::size_t>(((i % l) + l) % l)];
  }
  friend bool operator==(const CycleShape& a, const CycleShape& b) { return a.n_ == b.n_; }

 private:
  std::vector<long long> n_;
};

/// Prescribed rank bounds, one per arrow of the cycle.
using RankSeq = std::vector<long long>;

namespace detail {
inline long long cyclic_at(const RankSeq& r, long long i) {
  const auto l = static_cast<long long>(r.size());
  return r[static_cast<std::size_t>(((i % l) + l) % l)];
}

inline void require_length(const CycleShape& shape, const RankSeq& r, const char* who) {
  if (r.size() != shape.length())
    throw std::invalid_argument(std::string(who) + ": rank sequence length differs from cycle length");
}
}  // namespace detail

/// True iff r_i >= 0 and r_{i-1} + r_i <= n_i at every position. The same
/// inequality read at l = 1 gives the loop condition 2 r_0 <= n_0.
inline bool is_rank_sequence(const CycleShape& shape, const RankSeq& r) {
  detail::require_length(shape, r, "is_rank_sequence");
  const auto l = static_cast<long long>(shape.length());
  for (long long i = 0; i < l; ++i) {
    if (r[static_cast<std::size_t>(i)] < 0) return false;
    if (detail::cyclic_at(r, i - 1) + detail::cyclic_at(r, i) > shape.at(i)) return false;
  }
  return true;
}

/// All coordinatewise-maximal valid rank sequences, sorted lexicographically.
/// Full enumeration of the bounding box followed by a Pareto filter; the box
/// has at most prod(min(n_i, n_{i+1}) + 1) cells, tiny at the scales here.
inline std::vector<RankSeq> maximal_rank_sequences(const CycleShape& shape) {
  const std::size_t l = shape.length();
  std::vector<long long> box(l);
  for (std::size_t i = 0; i < l; ++i)
    box[i] = std::min(shape.at(static_cast<long long>(i)), shape.at(static_cast<long long>(i) + 1));
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
    for (const RankSeq& b : valid) {
      if (a == b) continue;
      bool leq = true, lt = false;
      for (std::size_t i = 0; i < l; ++i) {
        if (a[i] > b[i]) { leq = false; break; }
        if (a[i] < b[i]) lt = true;
      }
      if (leq && lt) { dominated = true; break; }
    }
    if (!dominated) maximal.push_back(a);
  }
  std::sort(maximal.begin(), maximal.end());
  return maximal;
}

/// Dimension of the rank-bounded subvariety: sum over i of
/// (r_{i-1} + r_i) (n_i - r_{i-1}).
inline long long dim_comp(const CycleShape& shape, const RankSeq& r) {
  detail::require_length(shape, r, "dim_comp");
  if (!is_rank_sequence(shape, r))
    throw std::invalid_argument("dim_comp: invalid rank sequence");
  long long dim = 0;
  const auto l = static_cast<long long>(shape.length());
  for (long long i = 0; i < l; ++i) {
    const long long prev = detail::cyclic_at(r, i - 1);
    dim += (prev + detail::cyclic_at(r, i)) * (shape.at(i) - prev);
  }
  return dim;
}

/// Coordinatewise dominance; r1 <= r2 means the smaller variety sits inside
/// the closure of the larger one's open stratum.
inline bool closure_leq(const RankSeq& r1, const RankSeq& r2) {
  if (r1.size() != r2.size())
    throw std::invalid_argument("closure_leq: rank sequences of different lengths");
  for (std::size_t i = 0; i < r1.size(); ++i)
    if (r1[i] > r2[i]) return false;
  return true;
}

struct CycleMultiplicities {
  std::vector<long long> t;  // one two-vertex (or loop Jordan) summand per unit of rank
  std::vector<long long> s;  // simple summands: s_i = n_i - r_i - r_{i-1}
};

/// Summand multiplicities of the generic point with rank sequence r:
/// t_i = r_i copies of the rank-one module supported on arrow a_i and
/// s_i simples at vertex i, with t_{i-1} + t_i + s_i = n_i.
inline CycleMultiplicities indecomposable_multiplicities(const CycleShape& shape,
                                                         const RankSeq& r) {
  detail::require_length(shape, r, "indecomposable_multiplicities");
  if (!is_rank_sequence(shape, r))
    throw std::invalid_argument("indecomposable_multiplicities: invalid rank sequence");
  CycleMultiplicities m;
  m.t = r;
  const auto l = static_cast<long long>(shape.length());
  for (long long i = 0; i < l; ++i)
    m.s.push_back(shape.at(i) - detail::cyclic_at(r, i) - detail::cyclic_at(r, i - 1));
  return m;
}

/// The path algebra of the oriented cycle on l vertices with every length-two
/// path a relation; l = 1 is the loop with square zero. Vertices are named
/// "0".."l-1" and arrows "a0".."a<l-1>", a_i : i -> i+1 mod l.
inline std::shared_ptr<const BoundQuiver> cycle_algebra(std::size_t l) {
  if (l == 0) throw std::invalid_argument("cycle_algebra: length must be >= 1");
  std::vector<std::string> vertices;
  std::vector<Arrow> arrows;
  for (std::size_t i = 0; i < l; ++i) {
    vertices.push_back(std::to_string(i));
    arrows.push_back(Arrow{"a" + std::to_string(i), std::to_string(i),
                           std::to_string((i + 1) % l)});
  }
  Quiver q(vertices, arrows);
  std::vector<Relation> rels;
  for (std::size_t i = 0; i < l; ++i)
    rels.push_back(Relation(q, {RelTerm{Rat(1), Path{{"a" + std::to_string(i),
                                                      "a" + std::to_string((i + 1) % l)}}}}));
  return std::make_shared<const BoundQuiver>(BoundQuiver::make(std::move(q), std::move(rels)));
}

/// Rank data keyed by the cycle algebra's arrow names.
inline RankSequence to_rank_sequence(const RankSeq& r) {
  RankSequence out;
  for (std::size_t i = 0; i < r.size(); ++i) out["a" + std::to_string(i)] = r[i];
  return out;
}

inline DimVector to_dim_vector(const CycleShape& shape) {
  DimVector d;
  for (std::size_t i = 0; i < shape.length(); ++i)
    d[std::to_string(i)] = shape.at(static_cast<long long>(i));
  return d;
}

/// Normal form of the generic point with rank sequence r. Basis at vertex i:
/// first r_{i-1} image coordinates, then r_i source coordinates, then
/// n_i - r_{i-1} - r_i simple coordinates. A_i sends the source block of
/// vertex i identically onto the image block of vertex i+1 and kills the
/// rest, so rank A_i = r_i and every composite reads only killed columns.
template <class K>
Representation<K> build_M0(const CycleShape& shape, const RankSeq& r, FieldCtx<K> ctx) {
  detail::require_length(shape, r, "build_M0");
  if (!is_rank_sequence(shape, r))
    throw std::invalid_argument("build_M0: invalid rank sequence");
  const auto l = static_cast<long long>(shape.length());
  std::map<std::string, Matrix<K>> mats;
  for (long long i = 0; i < l; ++i) {
    Matrix<K> a(static_cast<std::size_t>(shape.at(i + 1)),
                static_cast<std::size_t>(shape.at(i)), ctx);
    const long long src_offset = detail::cyclic_at(r, i - 1);
    for (long long p = 0; p < detail::cyclic_at(r, i); ++p)
      a.at(static_cast<std::size_t>(p), static_cast<std::size_t>(src_offset + p)) = ctx.one();
    mats.emplace("a" + std::to_string(i), std::move(a));
  }
  return Representation<K>(cycle_algebra(shape.length()), to_dim_vector(shape),
                           std::move(mats), ctx);
}

inline Representation<Rat> build_M0(const CycleShape& shape, const RankSeq& r) {
  return build_M0(shape, r, FieldCtx<Rat>{});
}

/// One-parameter family joining the generic points of two comparable rank
/// sequences. Basis at vertex i: r'_{i-1} image, r'_i source,
/// n_i - r_i - r_{i-1} simple, then e_{i-1} scaled-image and e_i
/// scaled-source coordinates, where e = r - r_target >= 0. A_i acts as the
/// identity from source to image and as multiplication by lambda from
/// scaled-source to scaled-image, so its rank is r'_i plus (lambda != 0) e_i:
/// the family has rank sequence r away from lambda = 0 and r_target there.
/// Composites vanish for every lambda because written rows and read columns
/// never overlap.
template <class K>
Representation<K> degeneration_path(const CycleShape& shape, const RankSeq& r,
                                    const RankSeq& r_target, const K& lambda,
                                    FieldCtx<K> ctx) {
  detail::require_length(shape, r, "degeneration_path");
  detail::require_length(shape, r_target, "degeneration_path");
  if (!is_rank_sequence(shape, r) || !is_rank_sequence(shape, r_target))
    throw std::invalid_argument("degeneration_path: invalid rank sequence");
  if (!closure_leq(r_target, r))
    throw std::invalid_argument(
        "degeneration_path: rank sequences are not coordinatewise comparable");
  const auto l = static_cast<long long>(shape.length());
  auto eps = [&](long long i) {
    return detail::cyclic_at(r, i) - detail::cyclic_at(r_target, i);
  };
  auto simple = [&](long long i) {
    return shape.at(i) - detail::cyclic_at(r, i) - detail::cyclic_at(r, i - 1);
  };
  // Offset of the scaled-image block at vertex i.
  auto scaled_base = [&](long long i) {
    return detail::cyclic_at(r_target, i - 1) + detail::cyclic_at(r_target, i) + simple(i);
  };
  std::map<std::string, Matrix<K>> mats;
  for (long long i = 0; i < l; ++i) {
    Matrix<K> a(static_cast<std::size_t>(shape.at(i + 1)),
                static_cast<std::size_t>(shape.at(i)), ctx);
    const long long src = detail::cyclic_at(r_target, i - 1);
    for (long long p = 0; p < detail::cyclic_at(r_target, i); ++p)
      a.at(static_cast<std::size_t>(p), static_cast<std::size_t>(src + p)) = ctx.one();
    const long long scaled_src = scaled_base(i) + eps(i - 1);
    const long long scaled_im = scaled_base(i + 1);
    for (long long p = 0; p < eps(i); ++p)
      a.at(static_cast<std::size_t>(scaled_im + p),
           static_cast<std::size_t>(scaled_src + p)) = lambda;
    mats.emplace("a" + std::to_string(i), std::move(a));
  }
  return Representation<K>(cycle_algebra(shape.length()), to_dim_vector(shape),
                           std::move(mats), ctx);
}

inline Representation<Rat> degeneration_path(const CycleShape& shape, const RankSeq& r,
                                             const RankSeq& r_target, const Rat& lambda) {
  return degeneration_path(shape, r, r_target, lambda, FieldCtx<Rat>{});
}

struct CountOptions {
  long long budget = 50'000'000;  // candidate matrices materialized before giving up
  int threads = 0;                // 0: BISERIAL_THREADS env var, else 1
};

namespace detail {
inline Matrix<Fp> matrix_from_index(std::size_t rows, std::size_t cols, long long q,
                                    long long idx, FieldCtx<Fp> ctx) {
  Matrix<Fp> m(rows, cols, ctx);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      m.at(i, j) = ctx.from_int(idx % q);
      idx /= q;
    }
  return m;
}

inline int resolve_thread_count(int requested) {
  if (requested > 0) return std::min(requested, 64);
  if (const char* env = std::getenv("BISERIAL_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1) return static_cast<int>(std::min<long>(v, 64));
  }
  return 1;
}
}  // namespace detail

/// Exact number of F_q points: tuples (A_0..A_{l-1}) with rank A_i <= r_i and
/// all cyclic composites zero. Depth-first over candidate matrices in a fixed
/// odometer order, pruning each composite as soon as both factors are chosen;
/// r is only an upper bound here and need not be a valid rank sequence, so
/// the full variety can be counted by passing the box bounds. Work is metered
/// by candidates materialized; both the count and the budget verdict depend
/// only on the inputs, not on the thread count.
inline long long count_points(const CycleShape& shape, const RankSeq& r, long long q,
                              CountOptions opt = {}) {
  detail::require_length(shape, r, "count_points");
  for (long long v : r)
    if (v < 0) throw std::invalid_argument("count_points: rank bounds must be >= 0");
  if (q != 2 && q != 3 && q != 5)
    throw DomainError("count_points: the field order must be 2, 3, or 5");
  if (opt.budget < 1) throw BudgetExceeded("count_points: budget must be positive");
  const std::size_t l = shape.length();
  FieldCtx<Fp> ctx(q);
  std::vector<long long> cand(l, 1);
  for (std::size_t i = 0; i < l; ++i) {
    const long long entries = shape.at(static_cast<long long>(i) + 1) *
                              shape.at(static_cast<long long>(i));
    Int total(1);
    for (long long e = 0; e < entries; ++e) total *= q;
    if (total > Int(opt.budget))
      throw BudgetExceeded("count_points: a single arrow exceeds the work budget");
    cand[i] = static_cast<long long>(total);
  }

  std::atomic<long long> nodes{0};
  std::atomic<bool> over{false};
  auto run_range = [&](long long lo, long long hi) -> long long {
    std::vector<Matrix<Fp>> chosen(l, Matrix<Fp>(0, 0, ctx));
    long long found = 0;
    auto rec = [&](auto&& self, std::size_t level) -> void {
      if (over.load(std::memory_order_relaxed)) return;
      if (level == l) {
        if ((chosen[0] * chosen[l - 1]).is_zero()) ++found;
        return;
      }
      const long long lo_here = level == 0 ? lo : 0;
      const long long hi_here = level == 0 ? hi : cand[level];
      for (long long idx = lo_here; idx < hi_here; ++idx) {
        if (nodes.fetch_add(1, std::memory_order_relaxed) + 1 > opt.budget) {
          over.store(true, std::memory_order_relaxed);
          return;
        }
        Matrix<Fp> m = detail::matrix_from_index(
            static_cast<std::size_t>(shape.at(static_cast<long long>(level) + 1)),
            static_cast<std::size_t>(shape.at(static_cast<long long>(level))), q, idx, ctx);
        if (static_cast<long long>(rank(m)) > r[level]) continue;
        if (level > 0 && !(m * chosen[level - 1]).is_zero()) continue;
        chosen[level] = std::move(m);
        self(self, level + 1);
        if (over.load(std::memory_order_relaxed)) return;
      }
    };
    rec(rec, 0);
    return found;
  };

  const int threads = std::min<long long>(detail::resolve_thread_count(opt.threads), cand[0]);
  long long total = 0;
  if (threads <= 1) {
    total = run_range(0, cand[0]);
  } else {
    std::vector<long long> partial(static_cast<std::size_t>(threads), 0);
    std::vector<std::thread> pool;
    const long long chunk = (cand[0] + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const long long lo = t * chunk;
      const long long hi = std::min(cand[0], lo + chunk);
      pool.emplace_back([&, t, lo, hi] { partial[static_cast<std::size_t>(t)] = run_range(lo, hi); });
    }
    for (std::thread& th : pool) th.join();
    for (long long p : partial) total += p;
  }
  if (over.load()) throw BudgetExceeded("count_points: work budget exceeded");
  return total;
}

}  // namespace biserial
