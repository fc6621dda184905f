#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "biserial/circular.hpp"
#include "biserial/components.hpp"
#include "biserial/endo.hpp"
#include "biserial/representation.hpp"
#include "biserial/rng.hpp"
#include "biserial/strings.hpp"
#include "support/corpus.hpp"

using namespace biserial;

namespace {

std::shared_ptr<const BoundQuiver> shared_algebra(BoundQuiver q) {
  return std::make_shared<const BoundQuiver>(std::move(q));
}

FieldCtx<Rat> rat_ctx() { return FieldCtx<Rat>{}; }

std::vector<std::string> renders_of_strings(const std::vector<StringWord>& ws) {
  std::vector<std::string> out;
  for (const StringWord& w : ws)
    out.push_back(w.length() == 0 ? "(" + w.positions()[0] + ")" : word_to_string(w.letters()));
  return out;
}

Representation<Rat> conjugate_randomly(const Representation<Rat>& m, std::uint64_t seed) {
  Rng rng(seed);
  std::map<std::string, Matrix<Rat>> g;
  for (const auto& [v, n] : m.dim())
    g.emplace(v, random_invertible(static_cast<std::size_t>(n), rng));
  return conjugate(m, g);
}

}  // namespace

TEST_CASE("word validation") {
  auto kron = shared_algebra(corpus::kronecker());
  auto cyc2 = shared_algebra(corpus::cyclic(2));

  SECTION("walks must be connected") {
    REQUIRE_THROWS_AS(StringWord(kron, "1", {Letter{"a", false}, Letter{"b", false}}),
                      std::invalid_argument);
  }

  SECTION("a letter never follows its own inverse") {
    REQUIRE_THROWS_AS(StringWord(kron, "1", {Letter{"a", false}, Letter{"a", true}}),
                      std::invalid_argument);
  }

  SECTION("direct pairs composing into a relation are rejected") {
    REQUIRE_THROWS_AS(StringWord(cyc2, "0", {Letter{"a0", false}, Letter{"a1", false}}),
                      std::invalid_argument);
  }

  SECTION("inverse pairs whose reversal is a relation are rejected") {
    REQUIRE_THROWS_AS(StringWord(cyc2, "1", {Letter{"a1", true}, Letter{"a0", true}}),
                      std::invalid_argument);
  }

  SECTION("mixed pairs through the same vertex are allowed") {
    StringWord w(kron, "1", {Letter{"a", false}, Letter{"b", true}});
    REQUIRE(w.positions() == std::vector<std::string>{"1", "2", "1"});
  }

  SECTION("bands need both directions") {
    REQUIRE_THROWS_AS(BandWord(cyc2, {Letter{"a0", false}, Letter{"a1", false}}),
                      std::invalid_argument);
  }

  SECTION("bands must be primitive") {
    auto two = shared_algebra(corpus::two_loops());
    std::vector<Letter> twice{Letter{"a", false}, Letter{"b", true}, Letter{"a", false},
                              Letter{"b", true}};
    REQUIRE_THROWS_AS(BandWord(two, twice), std::invalid_argument);
  }

  SECTION("band normalization picks the least rotation or inversion") {
    auto two = shared_algebra(corpus::two_loops());
    BandWord b1(two, {Letter{"a", false}, Letter{"b", true}});
    BandWord b2(two, {Letter{"b", true}, Letter{"a", false}});
    BandWord b3(two, {Letter{"b", false}, Letter{"a", true}});
    REQUIRE(word_to_string(b1.letters()) == "a.b^-1");
    REQUIRE(b1 == b2);
    REQUIRE(b1 == b3);
  }
}

TEST_CASE("word serialization") {
  auto kron = shared_algebra(corpus::kronecker());
  std::vector<Letter> letters{Letter{"a", false}, Letter{"b", true}};
  std::string text = word_to_string(letters);
  REQUIRE(text == "a.b^-1");
  REQUIRE(letters_from_string(*kron, text) == letters);
  REQUIRE_THROWS_AS(letters_from_string(*kron, "a..b"), std::invalid_argument);
  REQUIRE_THROWS_AS(letters_from_string(*kron, "zz"), std::invalid_argument);
}

TEST_CASE("string enumeration") {
  SECTION("the two vertex cycle has exactly the four short walks") {
    auto cyc2 = shared_algebra(corpus::cyclic(2));
    std::vector<std::string> got = renders_of_strings(enumerate_strings(cyc2, 4));
    std::vector<std::string> want{"(0)", "(1)", "a0", "a1"};
    REQUIRE(got == want);
  }

  SECTION("the one vertex cycle has the simple and the nilpotent block") {
    auto cyc1 = shared_algebra(corpus::cyclic(1));
    std::vector<std::string> got = renders_of_strings(enumerate_strings(cyc1, 4));
    std::vector<std::string> want{"(0)", "a0"};
    REQUIRE(got == want);
  }

  SECTION("Kronecker walks up to total dimension three") {
    auto kron = shared_algebra(corpus::kronecker());
    std::vector<std::string> got = renders_of_strings(enumerate_strings(kron, 3));
    std::vector<std::string> want{"(1)", "(2)", "a", "b", "a.b^-1", "a^-1.b"};
    REQUIRE(got == want);
  }

  SECTION("a zero bound yields nothing") {
    auto kron = shared_algebra(corpus::kronecker());
    REQUIRE(enumerate_strings(kron, 0).empty());
  }

  SECTION("every enumerated module satisfies the relations") {
    auto alg = completion_with_zero_set(corpus::cyclic(3)).first;
    for (const StringWord& w : enumerate_strings(alg, 5)) {
      Representation<Rat> m = string_module(w);
      REQUIRE(check_relations(m).ok);
      REQUIRE(m.dim() == w.dim_vector());
    }
  }
}

TEST_CASE("band enumeration") {
  SECTION("Kronecker has one short band") {
    auto kron = shared_algebra(corpus::kronecker());
    std::vector<BandWord> bands = enumerate_bands(kron, 2);
    REQUIRE(bands.size() == 1);
    REQUIRE(word_to_string(bands[0].letters()) == "a.b^-1");
    REQUIRE(bands[0].dim_vector() == DimVector{{"1", 1}, {"2", 1}});
  }

  SECTION("finite type cycles have no bands") {
    REQUIRE(enumerate_bands(shared_algebra(corpus::cyclic(2)), 8).empty());
    REQUIRE(enumerate_bands(shared_algebra(corpus::cyclic(1)), 8).empty());
  }

  SECTION("the two loop algebra has the alternating band at dimension two") {
    auto two = shared_algebra(corpus::two_loops());
    std::vector<BandWord> bands = enumerate_bands(two, 2);
    REQUIRE(bands.size() == 1);
    REQUIRE(word_to_string(bands[0].letters()) == "a.b^-1");
    REQUIRE(bands[0].dim_vector() == DimVector{{"v", 2}});
  }

  SECTION("every enumerated band module satisfies the relations") {
    auto two = shared_algebra(corpus::two_loops());
    for (const BandWord& b : enumerate_bands(two, 4)) {
      Representation<Rat> m = band_module(b, make_rat(3, 2));
      REQUIRE(check_relations(m).ok);
      REQUIRE(m.dim() == b.dim_vector());
    }
  }
}

TEST_CASE("string modules") {
  SECTION("the trivial walk gives a simple") {
    auto kron = shared_algebra(corpus::kronecker());
    StringWord w(kron, "2", {});
    Representation<Rat> m = string_module(w);
    REQUIRE(m.dim() == DimVector{{"1", 0}, {"2", 1}});
    REQUIRE(m.mat("a").is_zero());
    REQUIRE(m.mat("b").is_zero());
  }

  SECTION("a one letter walk gives the connecting representation") {
    auto cyc2 = shared_algebra(corpus::cyclic(2));
    StringWord w(cyc2, "0", {Letter{"a0", false}});
    Representation<Rat> m = string_module(w);
    REQUIRE(m.dim() == DimVector{{"0", 1}, {"1", 1}});
    REQUIRE(m.mat("a0").at(0, 0) == make_rat(1));
    REQUIRE(m.mat("a1").is_zero());
  }

  SECTION("the loop walk gives the nilpotent Jordan block") {
    auto cyc1 = shared_algebra(corpus::cyclic(1));
    StringWord w(cyc1, "0", {Letter{"a0", false}});
    Representation<Rat> m = string_module(w);
    REQUIRE(m.dim_at("0") == 2);
    REQUIRE(rank(m.mat("a0")) == 1);
    REQUIRE((m.mat("a0") * m.mat("a0")).is_zero());
  }

  SECTION("the Kronecker one letter walk") {
    auto kron = shared_algebra(corpus::kronecker());
    Representation<Rat> m = string_module(StringWord(kron, "1", {Letter{"a", false}}));
    REQUIRE(m.mat("a").at(0, 0) == make_rat(1));
    REQUIRE(m.mat("b").is_zero());
  }
}

TEST_CASE("band modules") {
  auto kron = shared_algebra(corpus::kronecker());
  BandWord b(kron, {Letter{"a", false}, Letter{"b", true}});

  SECTION("the Kronecker band with parameter lambda") {
    Representation<Rat> m = band_module(b, make_rat(5));
    REQUIRE(m.dim() == DimVector{{"1", 1}, {"2", 1}});
    REQUIRE(m.mat("a").at(0, 0) == make_rat(1));
    REQUIRE(m.mat("b").at(0, 0) == make_rat(5));
  }

  SECTION("a zero parameter is rejected") {
    REQUIRE_THROWS_AS(band_module(b, make_rat(0)), DomainError);
  }

  SECTION("multiplicity two doubles the dimension and has a two dimensional endomorphism algebra") {
    Representation<Rat> m = band_module(b, make_rat(2), 2);
    REQUIRE(m.dim() == DimVector{{"1", 2}, {"2", 2}});
    REQUIRE(check_relations(m).ok);
    REQUIRE(end_ring(m).dimension() == 2);
    REQUIRE(is_indecomposable(m).indecomposable);
  }

  SECTION("mult one band modules are Schur") {
    Representation<Rat> m = band_module(b, make_rat(7));
    REQUIRE(end_ring(m).dimension() == 1);
  }

  SECTION("the two loop band checks its relations") {
    auto two = shared_algebra(corpus::two_loops());
    BandWord lb(two, {Letter{"a", false}, Letter{"b", true}});
    Representation<Rat> m = band_module(lb, make_rat(1));
    REQUIRE(m.dim_at("v") == 2);
    REQUIRE(check_relations(m).ok);
    REQUIRE(m.mat("a").at(1, 0) == make_rat(1));
    REQUIRE(m.mat("b").at(1, 0) == make_rat(1));
    REQUIRE(end_ring(m).dimension() == 2);
  }

  SECTION("distinct parameters give non isomorphic modules, equal ones isomorphic") {
    Representation<Rat> m2 = band_module(b, make_rat(2));
    Representation<Rat> m3 = band_module(b, make_rat(3));
    REQUIRE_FALSE(is_isomorphic(m2, m3));
    REQUIRE(is_isomorphic(m2, band_module(b, make_rat(2))));
    REQUIRE(is_isomorphic(m2, conjugate_randomly(m2, 5)));
  }
}

TEST_CASE("summand identification") {
  auto kron = shared_algebra(corpus::kronecker());

  SECTION("simples") {
    DimVector d{{"1", 1}, {"2", 0}};
    Identification id = identify(zero_representation<Rat>(kron, d, rat_ctx()), kron);
    REQUIRE(id.kind == Identification::Kind::Simple);
    REQUIRE(id.vertex == "1");
  }

  SECTION("a conjugated nilpotent Jordan block is recognized as the loop string") {
    auto cyc1 = completion_with_zero_set(corpus::cyclic(1)).first;
    StringWord w(cyc1, "0", {Letter{"a0", false}});
    std::map<std::string, Matrix<Rat>> lift;
    lift.emplace("a0", string_module(StringWord(shared_algebra(corpus::cyclic(1)), "0",
                                                {Letter{"a0", false}}))
                           .mat("a0"));
    lift.emplace("w1", Matrix<Rat>(2, 2, rat_ctx()));
    Representation<Rat> m(cyc1, DimVector{{"0", 2}}, lift, rat_ctx());
    Identification id = identify(conjugate_randomly(m, 11), cyc1);
    REQUIRE(id.kind == Identification::Kind::String);
    REQUIRE(word_to_string(id.word->letters()) == "a0");
  }

  SECTION("a generic Kronecker point is a band with the scalar ratio as parameter") {
    DimVector d{{"1", 1}, {"2", 1}};
    std::map<std::string, Matrix<Rat>> mats;
    Matrix<Rat> ma(1, 1, rat_ctx()), mb(1, 1, rat_ctx());
    ma.at(0, 0) = make_rat(4);
    mb.at(0, 0) = make_rat(6);
    mats.emplace("a", ma);
    mats.emplace("b", mb);
    Representation<Rat> m(kron, d, mats, rat_ctx());
    Identification id = identify(m, kron);
    REQUIRE(id.kind == Identification::Kind::Band);
    REQUIRE(id.lambda == make_rat(3, 2));
    REQUIRE(id.mult == 1);
  }

  SECTION("a conjugated two loop band recovers its parameter") {
    auto two = shared_algebra(corpus::two_loops());
    BandWord b(two, {Letter{"a", false}, Letter{"b", true}});
    Representation<Rat> m = conjugate_randomly(band_module(b, make_rat(7, 3)), 13);
    Identification id = identify(m, two);
    REQUIRE(id.kind == Identification::Kind::Band);
    REQUIRE(id.lambda == make_rat(7, 3));
  }

  SECTION("a multiplicity two band is identified with its multiplicity") {
    BandWord b(kron, {Letter{"a", false}, Letter{"b", true}});
    Representation<Rat> m = conjugate_randomly(band_module(b, make_rat(2), 2), 29);
    Identification id = identify(m, kron);
    REQUIRE(id.kind == Identification::Kind::Band);
    REQUIRE(id.lambda == make_rat(2));
    REQUIRE(id.mult == 2);
  }

  SECTION("representations outside the catalog are reported, not dropped") {
    // A decomposable input has no single matching candidate.
    DimVector d{{"1", 2}, {"2", 0}};
    Identification id = identify(zero_representation<Rat>(kron, d, rat_ctx()), kron);
    REQUIRE(id.kind == Identification::Kind::Unidentified);
    REQUIRE_FALSE(id.note.empty());
  }
}

TEST_CASE("cycle algebras reproduce their indecomposable catalog") {
  // For the bound cycle the full catalog is the simples plus the one letter
  // connecting strings, with no bands; decomposing a conjugated sum of all of
  // them recovers each exactly once.
  auto raw = shared_algebra(corpus::cyclic(2));
  std::vector<StringWord> strings = enumerate_strings(raw, 6);
  REQUIRE(renders_of_strings(strings) == std::vector<std::string>{"(0)", "(1)", "a0", "a1"});
  REQUIRE(enumerate_bands(raw, 6).empty());

  Representation<Rat> sum = string_module(strings[0]);
  for (std::size_t i = 1; i < strings.size(); ++i)
    sum = direct_sum(sum, string_module(strings[i]));
  Representation<Rat> scrambled = conjugate_randomly(sum, 37);
  SummandList parts = decompose(scrambled);
  REQUIRE(parts.size() == 4);
  for (const Summand& s : parts) {
    REQUIRE(s.multiplicity == 1);
    Identification id = identify(s.rep, raw);
    REQUIRE(id.kind != Identification::Kind::Unidentified);
  }
}
