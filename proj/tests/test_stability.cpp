#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "biserial/components.hpp"
#include "biserial/endo.hpp"
#include "biserial/errors.hpp"
#include "biserial/fp.hpp"
#include "biserial/matrix.hpp"
#include "biserial/representation.hpp"
#include "biserial/rng.hpp"
#include "biserial/stability.hpp"
#include "biserial/strings.hpp"
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

template <class K>
Matrix<K> mat1_of(K value, FieldCtx<K> ctx) {
  Matrix<K> m(1, 1, ctx);
  m.at(0, 0) = value;
  return m;
}

Representation<Rat> kronecker_pair(const std::shared_ptr<const BoundQuiver>& a, long long va,
                                   long long vb) {
  DimVector d{{"1", 1}, {"2", 1}};
  std::map<std::string, Matrix<Rat>> mats{{"a", mat1(va)}, {"b", mat1(vb)}};
  return Representation<Rat>(a, d, mats, rat_ctx());
}

DimVector dv(std::map<std::string, long long> m) { return DimVector(m.begin(), m.end()); }

const ComponentDescriptor& component_with_ranks(const std::vector<ComponentDescriptor>& cs,
                                                const RankSequence& want) {
  for (const ComponentDescriptor& c : cs) {
    bool ok = true;
    for (const auto& [arrow, r] : want) ok = ok && c.r.at(arrow) == r;
    if (ok) return c;
  }
  FAIL("no component with the requested ranks");
  return cs.front();
}

}  // namespace

TEST_CASE("subrepresentation dimension vectors by exhaustive scan") {
  auto kron = shared_algebra(corpus::kronecker());

  SECTION("a generic rank one pair only admits the image line") {
    FieldCtx<Fp> f2(2);
    std::map<std::string, Matrix<Fp>> mats{{"a", mat1_of(f2.one(), f2)},
                                           {"b", mat1_of(f2.one(), f2)}};
    Representation<Fp> m(kron, dv({{"1", 1}, {"2", 1}}), mats, f2);
    std::set<DimVector> subs = subrep_dim_vectors(m);
    std::set<DimVector> want{dv({{"1", 0}, {"2", 0}}), dv({{"1", 0}, {"2", 1}}),
                             dv({{"1", 1}, {"2", 1}})};
    REQUIRE(subs == want);
  }

  SECTION("the zero representation is closed under every subspace tuple") {
    FieldCtx<Fp> f3(3);
    Representation<Fp> z = zero_representation<Fp>(kron, dv({{"1", 1}, {"2", 1}}), f3);
    REQUIRE(subrep_dim_vectors(z).size() == 4);
  }

  SECTION("a nilpotent loop has exactly one invariant line") {
    auto loops = shared_algebra(corpus::two_loops());
    FieldCtx<Fp> f3(3);
    Matrix<Fp> a(2, 2, f3);
    a.at(1, 0) = f3.one();
    std::map<std::string, Matrix<Fp>> mats{{"a", a}, {"b", Matrix<Fp>(2, 2, f3)}};
    Representation<Fp> m(loops, dv({{"v", 2}}), mats, f3);
    std::set<DimVector> want{dv({{"v", 0}}), dv({{"v", 1}}), dv({{"v", 2}})};
    REQUIRE(subrep_dim_vectors(m) == want);
  }

  SECTION("the tuple budget is enforced") {
    FieldCtx<Fp> f5(5);
    Representation<Fp> z = zero_representation<Fp>(kron, dv({{"1", 2}, {"2", 2}}), f5);
    SubrepOptions tight;
    tight.max_tuples = 3;
    REQUIRE_THROWS_AS(subrep_dim_vectors(z, tight), BudgetExceeded);
  }
}

TEST_CASE("stability verdicts on the standard examples") {
  auto kron = shared_algebra(corpus::kronecker());
  Weight theta{{"1", 1}, {"2", -1}};

  SECTION("a generic rank one pair is stable") {
    StabilityVerdict v = check_stability(kronecker_pair(kron, 1, 1), theta);
    REQUIRE(v.status == StabilityStatus::Stable);
    REQUIRE_FALSE(v.witness.has_value());
    REQUIRE_FALSE(v.field_sensitive);
  }

  SECTION("the zero pair is destabilized by the source line") {
    StabilityVerdict v = check_stability(kronecker_pair(kron, 0, 0), theta);
    REQUIRE(v.status == StabilityStatus::Unstable);
    REQUIRE(v.witness == dv({{"1", 1}, {"2", 0}}));
  }

  SECTION("the zero weight makes everything semistable but nothing stable") {
    Weight flat{{"1", 0}, {"2", 0}};
    StabilityVerdict v = check_stability(kronecker_pair(kron, 1, 1), flat);
    REQUIRE(v.status == StabilityStatus::SemistableNotStable);
    REQUIRE(v.witness.has_value());
    REQUIRE(theta_pairing(flat, *v.witness) == 0);
  }

  SECTION("a simple of positive weight is unstable as a whole") {
    DimVector d{{"1", 1}, {"2", 0}};
    StabilityVerdict v = check_stability(zero_representation<Rat>(kron, d, rat_ctx()), theta);
    REQUIRE(v.status == StabilityStatus::Unstable);
    REQUIRE(v.witness == d);
  }

  SECTION("a negative total weight is a usage error, not an instability") {
    DimVector d{{"1", 0}, {"2", 1}};
    REQUIRE_THROWS_AS(check_stability(zero_representation<Rat>(kron, d, rat_ctx()), theta),
                      ThetaMismatch);
  }

  SECTION("verdicts are invariant under positive rescaling of the weight") {
    Weight triple{{"1", 3}, {"2", -3}};
    REQUIRE(check_stability(kronecker_pair(kron, 1, 1), triple).status ==
            StabilityStatus::Stable);
    REQUIRE(check_stability(kronecker_pair(kron, 0, 0), triple).status ==
            StabilityStatus::Unstable);
  }

  SECTION("a one arrow module over the completed cyclic algebra is stable") {
    auto cg = completion_with_zero_set(corpus::cyclic(2)).first;
    DimVector d{{"0", 1}, {"1", 1}};
    std::map<std::string, Matrix<Rat>> mats;
    for (const Arrow& a : cg->quiver().arrows()) mats.emplace(a.id, mat1(a.id == "a0" ? 1 : 0));
    Representation<Rat> e01(cg, d, mats, rat_ctx());
    Weight w{{"0", 1}, {"1", -1}};
    REQUIRE(check_stability(e01, w).status == StabilityStatus::Stable);
    REQUIRE(end_ring(e01).dimension() == 1);
  }
}

TEST_CASE("prime reduction is screened for rank drops") {
  auto kron = shared_algebra(corpus::kronecker());
  Weight theta{{"1", 1}, {"2", -1}};

  SECTION("an entry divisible by two knocks out the first prime only") {
    StabilityVerdict v = check_stability(kronecker_pair(kron, 2, 1), theta);
    REQUIRE(v.status == StabilityStatus::Stable);
    bool skipped_two = false;
    for (const std::string& n : v.notes)
      skipped_two = skipped_two || n.find("prime 2 skipped") != std::string::npos;
    REQUIRE(skipped_two);
    REQUIRE_FALSE(v.field_sensitive);
  }

  SECTION("denominators are cleared before reducing") {
    DimVector d{{"1", 1}, {"2", 1}};
    std::map<std::string, Matrix<Rat>> mats{{"a", mat1_of(make_rat(1, 2), rat_ctx())},
                                            {"b", mat1_of(make_rat(1, 3), rat_ctx())}};
    Representation<Rat> m(kron, d, mats, rat_ctx());
    StabilityVerdict v = check_stability(m, theta);
    REQUIRE(v.status == StabilityStatus::Stable);
  }

  SECTION("a module degenerate at every configured prime is rejected") {
    StabilityOptions opts;
    opts.primes = {2};
    REQUIRE_THROWS_AS(check_stability(kronecker_pair(kron, 2, 2), theta, opts), DomainError);
  }
}

TEST_CASE("direct sums are at best semistable") {
  auto kron = shared_algebra(corpus::kronecker());
  Weight theta{{"1", 1}, {"2", -1}};
  Representation<Rat> sum = direct_sum(kronecker_pair(kron, 1, 1), kronecker_pair(kron, 1, 2));
  StabilityVerdict v = check_stability(sum, theta);
  REQUIRE(v.status == StabilityStatus::SemistableNotStable);
  REQUIRE(v.witness.has_value());
  REQUIRE(theta_pairing(theta, *v.witness) == 0);
}

TEST_CASE("theta stable decompositions of Kronecker components") {
  auto completed = completion_with_zero_set(corpus::kronecker());
  Weight theta{{"1", 1}, {"2", -1}};

  SECTION("dimension one: a single band family") {
    std::vector<ComponentDescriptor> cs =
        components(completed.first, completed.second, dv({{"1", 1}, {"2", 1}}));
    REQUIRE(cs.size() == 1);
    ThetaStableDecomposition tsd = theta_stable_decomposition(cs[0], theta);
    REQUIRE(tsd.factors.size() == 1);
    REQUIRE(tsd.factors[0].kind == DecompositionFactor::Kind::BandFamily);
    REQUIRE(tsd.factors[0].multiplicity == 1);
    REQUIRE(tsd.factors[0].band.has_value());
  }

  SECTION("dimension two: two summands merge into one family of multiplicity two") {
    std::vector<ComponentDescriptor> cs =
        components(completed.first, completed.second, dv({{"1", 2}, {"2", 2}}));
    const ComponentDescriptor& top = component_with_ranks(cs, {{"a", 2}, {"b", 2}});
    ThetaStableDecomposition tsd = theta_stable_decomposition(top, theta);
    REQUIRE(tsd.factors.size() == 1);
    REQUIRE(tsd.factors[0].kind == DecompositionFactor::Kind::BandFamily);
    REQUIRE(tsd.factors[0].multiplicity == 2);
    REQUIRE(tsd.factors[0].lambdas.size() == 2);
    REQUIRE_FALSE(tsd.factors[0].lambdas[0] == tsd.factors[0].lambdas[1]);
  }

  SECTION("a component whose weight cannot vanish is rejected outright") {
    std::vector<ComponentDescriptor> cs =
        components(completed.first, completed.second, dv({{"1", 1}, {"2", 0}}));
    REQUIRE(cs.size() == 1);
    REQUIRE_THROWS_AS(theta_stable_decomposition(cs[0], theta), ThetaMismatch);
  }

  SECTION("a generic point destabilized by a subrepresentation is reported") {
    auto cyc = completion_with_zero_set(corpus::cyclic(2));
    std::vector<ComponentDescriptor> cs =
        components(cyc.first, cyc.second, dv({{"0", 1}, {"1", 1}}));
    Weight w{{"0", 1}, {"1", -1}};
    const ComponentDescriptor& wrong_way = component_with_ranks(cs, {{"a1", 1}});
    REQUIRE_THROWS_AS(theta_stable_decomposition(wrong_way, w), GenericPointUnstable);
    const ComponentDescriptor& right_way = component_with_ranks(cs, {{"a0", 1}});
    ThetaStableDecomposition tsd = theta_stable_decomposition(right_way, w);
    REQUIRE(tsd.factors.size() == 1);
    REQUIRE(tsd.factors[0].kind == DecompositionFactor::Kind::OrbitClosure);
  }

  SECTION("the zero weight leaves semistable summands and is reported as such") {
    std::vector<ComponentDescriptor> cs =
        components(completed.first, completed.second, dv({{"1", 1}, {"2", 1}}));
    Weight flat{{"1", 0}, {"2", 0}};
    REQUIRE_THROWS_AS(theta_stable_decomposition(cs[0], flat), SummandNotStable);
  }

  SECTION("a nonzero pairing on the component dimension vector is rejected") {
    std::vector<ComponentDescriptor> cs =
        components(completed.first, completed.second, dv({{"1", 1}, {"2", 1}}));
    Weight off{{"1", 1}, {"2", 0}};
    REQUIRE_THROWS_AS(theta_stable_decomposition(cs[0], off), ThetaMismatch);
  }

  SECTION("the same seed reproduces the same decomposition") {
    std::vector<ComponentDescriptor> cs =
        components(completed.first, completed.second, dv({{"1", 2}, {"2", 2}}));
    const ComponentDescriptor& top = component_with_ranks(cs, {{"a", 2}, {"b", 2}});
    ThetaStableDecomposition t1 = theta_stable_decomposition(top, theta, 42);
    ThetaStableDecomposition t2 = theta_stable_decomposition(top, theta, 42);
    REQUIRE(t1.factors.size() == t2.factors.size());
    REQUIRE(t1.factors[0].lambdas == t2.factors[0].lambdas);
  }
}

TEST_CASE("moduli structure over the corpus algebras") {
  SECTION("Kronecker moduli are projective spaces") {
    auto kron = shared_algebra(corpus::kronecker());
    Weight theta{{"1", 1}, {"2", -1}};
    for (long long m : {1LL, 2LL}) {
      auto table = moduli_structure(kron, dv({{"1", m}, {"2", m}}), theta);
      bool found = false;
      for (const auto& [c, ms] : table) {
        if (c.r.at("a") == m && c.r.at("b") == m) {
          REQUIRE(ms.computed);
          REQUIRE(ms.render() == "P^" + std::to_string(m));
          REQUIRE(ms.dimension() == m);
          found = true;
        }
      }
      REQUIRE(found);
    }
  }

  SECTION("the two vertex cycle splits into a point and an uncomputed component") {
    auto cyc = shared_algebra(corpus::cyclic(2));
    Weight theta{{"0", 1}, {"1", -1}};
    auto table = moduli_structure(cyc, dv({{"0", 1}, {"1", 1}}), theta);
    std::set<std::string> renders;
    for (const auto& [c, ms] : table) renders.insert(ms.render());
    REQUIRE(renders ==
            std::set<std::string>{"point", "not computed (generic point unstable)"});
  }

  SECTION("a two dimensional simple leaves only a point") {
    auto loops = shared_algebra(corpus::two_loops());
    Weight theta{{"v", 0}};
    auto table = moduli_structure(loops, dv({{"v", 2}}), theta);
    REQUIRE(table.size() == 1);
    REQUIRE(table[0].second.computed);
    REQUIRE(table[0].second.render() == "point");
  }

  SECTION("weights that pair nonzero with the dimension vector are rejected") {
    auto kron = shared_algebra(corpus::kronecker());
    Weight theta{{"1", 1}, {"2", -1}};
    REQUIRE_THROWS_AS(moduli_structure(kron, dv({{"1", 2}, {"2", 1}}), theta), ThetaMismatch);
  }
}

TEST_CASE("stability agrees across the configured primes") {
  auto kron = shared_algebra(corpus::kronecker());
  Weight theta{{"1", 1}, {"2", -1}};
  Rng rng(7);
  for (int t = 0; t < 8; ++t) {
    long long num = rng.uniform(1, 5);
    long long den = rng.uniform(1, 5);
    Representation<Rat> m = kronecker_pair(kron, 1, 1);
    std::map<std::string, Matrix<Rat>> mats{{"a", mat1(1)},
                                            {"b", mat1_of(make_rat(num, den), rat_ctx())}};
    m = Representation<Rat>(kron, dv({{"1", 1}, {"2", 1}}), mats, rat_ctx());
    StabilityVerdict v = check_stability(m, theta);
    REQUIRE(v.status == StabilityStatus::Stable);
    REQUIRE_FALSE(v.field_sensitive);
  }
}
