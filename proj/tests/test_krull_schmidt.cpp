#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "biserial/components.hpp"
#include "biserial/circular.hpp"
#include "biserial/endo.hpp"
#include "biserial/hom.hpp"
#include "biserial/matrix.hpp"
#include "biserial/representation.hpp"
#include "biserial/rng.hpp"
#include "support/corpus.hpp"

using namespace biserial;

namespace {

std::shared_ptr<const BoundQuiver> shared_algebra(BoundQuiver q) {
  return std::make_shared<const BoundQuiver>(std::move(q));
}

FieldCtx<Rat> rat_ctx() { return FieldCtx<Rat>{}; }

Matrix<Rat> mat1(long long v) {
  Matrix<Rat> m(1, 1, rat_ctx());
  m.at(0, 0) = make_rat(v);
  return m;
}

/// Simple at a vertex: dimension one there, zero elsewhere, all maps zero.
Representation<Rat> simple_at(const std::shared_ptr<const BoundQuiver>& a,
                              const std::string& vertex) {
  DimVector d;
  for (const std::string& v : a->quiver().vertices()) d[v] = v == vertex ? 1 : 0;
  return zero_representation<Rat>(a, d, rat_ctx());
}

/// Kronecker representation k -> k^... with both maps 1x1.
Representation<Rat> kronecker_band(const std::shared_ptr<const BoundQuiver>& a, long long lam) {
  DimVector d{{"1", 1}, {"2", 1}};
  std::map<std::string, Matrix<Rat>> mats{{"a", mat1(1)}, {"b", mat1(lam)}};
  return Representation<Rat>(a, d, mats, rat_ctx());
}

Representation<Rat> conjugate_randomly(const Representation<Rat>& m, std::uint64_t seed) {
  Rng rng(seed);
  std::map<std::string, Matrix<Rat>> g;
  for (const auto& [v, n] : m.dim())
    g.emplace(v, random_invertible(static_cast<std::size_t>(n), rng));
  return conjugate(m, g);
}

}  // namespace

TEST_CASE("endomorphism ring dimensions") {
  auto kron = shared_algebra(corpus::kronecker());

  SECTION("a simple has a one dimensional endomorphism algebra") {
    EndBasis e = end_ring(simple_at(kron, "1"));
    REQUIRE(e.dimension() == 1);
  }

  SECTION("the identity leads the basis") {
    Representation<Rat> m = kronecker_band(kron, 2);
    EndBasis e = end_ring(m);
    REQUIRE(e.dimension() == 1);
    for (const auto& [v, mat] : e.elements[0])
      REQUIRE(mat == Matrix<Rat>::identity(mat.rows(), rat_ctx()));
  }

  SECTION("a square doubles twice plus the cross terms") {
    Representation<Rat> m = kronecker_band(kron, 2);
    Representation<Rat> mm = direct_sum(m, m);
    REQUIRE(end_ring(mm).dimension() == 4);
  }

  SECTION("dim End(M + N) = dim End M + dim End N + dim Hom both ways") {
    Representation<Rat> m = kronecker_band(kron, 2);
    Representation<Rat> n = simple_at(kron, "2");
    long long lhs = end_ring(direct_sum(m, n)).dimension();
    long long rhs = end_ring(m).dimension() + end_ring(n).dimension() + hom_dim(m, n) + hom_dim(n, m);
    REQUIRE(lhs == rhs);
  }

  SECTION("the zero representation has an empty basis") {
    DimVector d{{"1", 0}, {"2", 0}};
    REQUIRE(end_ring(zero_representation<Rat>(kron, d, rat_ctx())).dimension() == 0);
  }
}

TEST_CASE("indecomposability certificates") {
  auto kron = shared_algebra(corpus::kronecker());

  SECTION("simples are indecomposable") {
    REQUIRE(is_indecomposable(simple_at(kron, "1")).indecomposable);
    REQUIRE(is_indecomposable(simple_at(kron, "2")).indecomposable);
  }

  SECTION("one dimensional parameter families are indecomposable") {
    REQUIRE(is_indecomposable(kronecker_band(kron, 1)).indecomposable);
    REQUIRE(is_indecomposable(kronecker_band(kron, 5)).indecomposable);
  }

  SECTION("a doubled simple is decomposable even after conjugation") {
    Representation<Rat> s2 = direct_sum(simple_at(kron, "1"), simple_at(kron, "1"));
    IndecomposabilityResult r = is_indecomposable(s2);
    REQUIRE_FALSE(r.indecomposable);
  }

  SECTION("a doubled band is decomposable") {
    Representation<Rat> m = kronecker_band(kron, 3);
    Representation<Rat> mm = conjugate_randomly(direct_sum(m, m), 99);
    IndecomposabilityResult r = is_indecomposable(mm);
    REQUIRE_FALSE(r.indecomposable);
  }

  SECTION("the zero representation is not indecomposable") {
    DimVector d{{"1", 0}, {"2", 0}};
    REQUIRE_FALSE(is_indecomposable(zero_representation<Rat>(kron, d, rat_ctx())).indecomposable);
  }
}

TEST_CASE("isomorphism testing") {
  auto kron = shared_algebra(corpus::kronecker());
  Representation<Rat> m2 = kronecker_band(kron, 2);
  Representation<Rat> m3 = kronecker_band(kron, 3);

  SECTION("every representation is isomorphic to itself and its conjugates") {
    REQUIRE(is_isomorphic(m2, m2));
    REQUIRE(is_isomorphic(m2, conjugate_randomly(m2, 7)));
  }

  SECTION("distinct parameters are not isomorphic") {
    REQUIRE_FALSE(is_isomorphic(m2, m3));
  }

  SECTION("dimension vectors settle the question fast") {
    REQUIRE_FALSE(is_isomorphic(simple_at(kron, "1"), simple_at(kron, "2")));
  }

  SECTION("rank sequences settle sums against extensions") {
    // The connecting representation has rank one on arrow a; the sum of
    // simples has rank zero everywhere.
    DimVector d{{"1", 1}, {"2", 1}};
    std::map<std::string, Matrix<Rat>> mats{{"a", mat1(1)}, {"b", mat1(0)}};
    Representation<Rat> e01(kron, d, mats, rat_ctx());
    Representation<Rat> split = direct_sum(simple_at(kron, "1"), simple_at(kron, "2"));
    REQUIRE_FALSE(is_isomorphic(e01, split));
  }

  SECTION("zero representations are isomorphic") {
    DimVector d{{"1", 0}, {"2", 0}};
    auto z = zero_representation<Rat>(kron, d, rat_ctx());
    REQUIRE(is_isomorphic(z, z));
  }
}

TEST_CASE("decomposition of known sums") {
  auto kron = shared_algebra(corpus::kronecker());

  SECTION("an indecomposable survives unchanged") {
    SummandList s = decompose(kronecker_band(kron, 2));
    REQUIRE(s.size() == 1);
    REQUIRE(s[0].multiplicity == 1);
    REQUIRE(s[0].rep.total_dim() == 2);
  }

  SECTION("a doubled simple splits with multiplicity two") {
    Representation<Rat> s2 = direct_sum(simple_at(kron, "1"), simple_at(kron, "1"));
    SummandList s = decompose(s2);
    REQUIRE(s.size() == 1);
    REQUIRE(s[0].multiplicity == 2);
    REQUIRE(s[0].rep.total_dim() == 1);
  }

  SECTION("a doubled band splits with multiplicity two") {
    Representation<Rat> m = kronecker_band(kron, 3);
    Representation<Rat> mm = conjugate_randomly(direct_sum(m, m), 41);
    SummandList s = decompose(mm);
    REQUIRE(s.size() == 1);
    REQUIRE(s[0].multiplicity == 2);
    REQUIRE(is_isomorphic(s[0].rep, m));
  }

  SECTION("the zero representation decomposes into nothing") {
    DimVector d{{"1", 0}, {"2", 0}};
    REQUIRE(decompose(zero_representation<Rat>(kron, d, rat_ctx())).empty());
  }

  SECTION("a zero map splits into simples over the two loop algebra") {
    auto two = shared_algebra(corpus::two_loops());
    DimVector d{{"v", 2}};
    SummandList s = decompose(zero_representation<Rat>(two, d, rat_ctx()));
    REQUIRE(s.size() == 1);
    REQUIRE(s[0].multiplicity == 2);
    REQUIRE(s[0].rep.total_dim() == 1);
  }

  SECTION("mixed sums recover every part") {
    Representation<Rat> m = direct_sum(direct_sum(kronecker_band(kron, 2), simple_at(kron, "1")),
                                       simple_at(kron, "1"));
    SummandList s = decompose(conjugate_randomly(m, 17));
    long long total = 0;
    for (const Summand& x : s) total += x.multiplicity * x.rep.total_dim();
    REQUIRE(total == 4);
    REQUIRE(s.size() == 2);
    REQUIRE(s[0].rep.total_dim() == 1);
    REQUIRE(s[0].multiplicity == 2);
    REQUIRE(s[1].rep.total_dim() == 2);
    REQUIRE(s[1].multiplicity == 1);
  }
}

TEST_CASE("decomposition matches the cycle normal forms") {
  // The normal form at ((2,2),(1,0)) is a connecting representation plus one
  // simple at each vertex; the predicted multiplicities come from the rank
  // sequence arithmetic.
  auto alg = completion_with_zero_set(corpus::cyclic(2)).first;
  CycleShape shape({2, 2});
  RankSeq r{1, 0};
  Representation<Rat> m0 = build_M0(shape, r, rat_ctx());

  DimVector d{{"0", 2}, {"1", 2}};
  std::map<std::string, Matrix<Rat>> lift;
  lift.emplace("a0", m0.mat("a0"));
  lift.emplace("a1", m0.mat("a1"));
  lift.emplace("w1", Matrix<Rat>(2, 2, rat_ctx()));
  lift.emplace("w2", Matrix<Rat>(2, 2, rat_ctx()));
  Representation<Rat> m(alg, d, lift, rat_ctx());

  SummandList s = decompose(conjugate_randomly(m, 23));
  REQUIRE(s.size() == 3);
  long long ones = 0;
  long long twos = 0;
  for (const Summand& x : s) {
    if (x.rep.total_dim() == 1) ones += x.multiplicity;
    if (x.rep.total_dim() == 2) twos += x.multiplicity;
  }
  CycleMultiplicities cm = indecomposable_multiplicities(shape, r);
  REQUIRE(twos == cm.t[0]);
  REQUIRE(ones == cm.s[0] + cm.s[1]);
}

TEST_CASE("round trips through random direct sums") {
  auto kron = shared_algebra(corpus::kronecker());
  Rng rng(kDefaultSeed);

  for (int trial = 0; trial < 12; ++trial) {
    // Draw up to three factors from a small pool of indecomposables.
    std::vector<Representation<Rat>> pool{
        simple_at(kron, "1"), simple_at(kron, "2"), kronecker_band(kron, 1),
        kronecker_band(kron, 2), kronecker_band(kron, -1)};
    long long budget = 6;
    std::vector<Representation<Rat>> chosen;
    int parts = 2 + static_cast<int>(rng.uniform(0, 1));
    for (int i = 0; i < parts; ++i) {
      const Representation<Rat>& pick = pool[static_cast<std::size_t>(rng.uniform(0, 4))];
      if (pick.total_dim() > budget) continue;
      budget -= pick.total_dim();
      chosen.push_back(pick);
    }
    if (chosen.empty()) continue;
    Representation<Rat> sum = chosen[0];
    for (std::size_t i = 1; i < chosen.size(); ++i) sum = direct_sum(sum, chosen[i]);
    Representation<Rat> scrambled = conjugate_randomly(sum, rng.next());

    SummandList s = decompose(scrambled, rng.next());
    long long total = 0;
    for (const Summand& x : s) total += x.multiplicity * x.rep.total_dim();
    REQUIRE(total == sum.total_dim());

    // Every recovered summand must be isomorphic to one of the chosen parts,
    // with matching counts.
    std::vector<bool> used(chosen.size(), false);
    for (const Summand& x : s) {
      long long need = x.multiplicity;
      for (std::size_t i = 0; i < chosen.size() && need > 0; ++i) {
        if (used[i]) continue;
        if (is_isomorphic(x.rep, chosen[i])) {
          used[i] = true;
          --need;
        }
      }
      REQUIRE(need == 0);
    }
  }
}

TEST_CASE("generic points have one endomorphism per summand") {
  auto [alg, zero] = completion_with_zero_set(corpus::kronecker());
  std::vector<ComponentDescriptor> cs = components(alg, zero, DimVector{{"1", 1}, {"2", 1}});
  REQUIRE(cs.size() == 1);
  Representation<Rat> g = sample_generic(cs[0], kDefaultSeed);
  SummandList s = decompose(g);
  long long count = 0;
  for (const Summand& x : s) count += x.multiplicity;
  REQUIRE(end_ring(g).dimension() == count);
}
