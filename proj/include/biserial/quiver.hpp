#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <biserial/errors.hpp>
#include <biserial/rational.hpp>

namespace biserial {

/// One arrow of a quiver: id, tail vertex, head vertex. Loops allowed.
struct Arrow {
  std::string id;
  std::string tail;
  std::string head;

  bool operator==(const Arrow&) const = default;
};

/// Finite directed multigraph. Vertices and arrows are kept sorted by id, so
/// structurally equal quivers compare equal and iteration order is stable.
class Quiver {
 public:
  Quiver() = default;

  Quiver(std::vector<std::string> vertices, std::vector<Arrow> arrows)
      : vertices_(std::move(vertices)), arrows_(std::move(arrows)) {
    std::sort(vertices_.begin(), vertices_.end());
    if (std::adjacent_find(vertices_.begin(), vertices_.end()) != vertices_.end())
      throw std::invalid_argument("duplicate vertex id");
    std::sort(arrows_.begin(), arrows_.end(),
              [](const Arrow& a, const Arrow& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < arrows_.size(); ++i) {
      const Arrow& a = arrows_[i];
      if (i > 0 && arrows_[i - 1].id == a.id)
        throw std::invalid_argument("duplicate arrow id '" + a.id + "'");
      if (!has_vertex(a.tail) || !has_vertex(a.head))
        throw std::invalid_argument("arrow '" + a.id + "' references unknown vertex");
      index_[a.id] = i;
    }
  }

  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<Arrow>& arrows() const { return arrows_; }

  bool has_vertex(const std::string& v) const {
    return std::binary_search(vertices_.begin(), vertices_.end(), v);
  }

  bool has_arrow(const std::string& id) const { return index_.count(id) != 0; }

  const Arrow& arrow(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::invalid_argument("unknown arrow '" + id + "'");
    return arrows_[it->second];
  }

  /// Ids of arrows with head v, sorted.
  std::vector<std::string> in_arrows(const std::string& v) const {
    std::vector<std::string> out;
    for (const Arrow& a : arrows_)
      if (a.head == v) out.push_back(a.id);
    return out;
  }

  /// Ids of arrows with tail v, sorted.
  std::vector<std::string> out_arrows(const std::string& v) const {
    std::vector<std::string> out;
    for (const Arrow& a : arrows_)
      if (a.tail == v) out.push_back(a.id);
    return out;
  }

  /// Connectivity of the underlying undirected graph; the empty quiver counts
  /// as connected. Disconnected inputs are legal but get a CLI warning.
  bool is_connected() const {
    if (vertices_.empty()) return true;
    std::set<std::string> seen{vertices_.front()};
    std::vector<std::string> stack{vertices_.front()};
    while (!stack.empty()) {
      std::string v = stack.back();
      stack.pop_back();
      for (const Arrow& a : arrows_) {
        for (const std::string& w : {a.tail, a.head}) {
          if ((a.tail == v || a.head == v) && !seen.count(w)) {
            seen.insert(w);
            stack.push_back(w);
          }
        }
      }
    }
    return seen.size() == vertices_.size();
  }

  bool operator==(const Quiver& o) const {
    return vertices_ == o.vertices_ && arrows_ == o.arrows_;
  }

 private:
  std::vector<std::string> vertices_;
  std::vector<Arrow> arrows_;
  std::map<std::string, std::size_t> index_;
};

/// A path of length >= 1, stored in application order: arrows[0] acts first.
/// Rendered right-to-left ("c*b*a" applies a, then b, then c) so the text
/// matches the usual product notation for composites.
struct Path {
  std::vector<std::string> arrows;

  bool operator==(const Path&) const = default;
  bool operator<(const Path& o) const { return arrows < o.arrows; }
};

inline std::string path_to_string(const Path& p) {
  std::string s;
  for (auto it = p.arrows.rbegin(); it != p.arrows.rend(); ++it) {
    if (!s.empty()) s += "*";
    s += *it;
  }
  return s;
}

inline bool path_is_composable(const Quiver& q, const Path& p) {
  if (p.arrows.empty()) return false;
  for (const std::string& id : p.arrows)
    if (!q.has_arrow(id)) return false;
  for (std::size_t i = 0; i + 1 < p.arrows.size(); ++i)
    if (q.arrow(p.arrows[i]).head != q.arrow(p.arrows[i + 1]).tail) return false;
  return true;
}

inline const std::string& path_source(const Quiver& q, const Path& p) {
  return q.arrow(p.arrows.front()).tail;
}

inline const std::string& path_target(const Quiver& q, const Path& p) {
  return q.arrow(p.arrows.back()).head;
}

struct RelTerm {
  Rat coeff;
  Path path;

  bool operator==(const RelTerm&) const = default;
};

/// A relation: a nonzero linear combination of parallel paths of length >= 2.
/// Terms are sorted by path at construction, giving a canonical form.
class Relation {
 public:
  Relation(const Quiver& q, std::vector<RelTerm> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw std::invalid_argument("relation with no terms");
    std::sort(terms_.begin(), terms_.end(),
              [](const RelTerm& a, const RelTerm& b) { return a.path < b.path; });
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      const RelTerm& t = terms_[i];
      if (t.coeff == 0) throw std::invalid_argument("relation term with zero coefficient");
      if (t.path.arrows.size() < 2)
        throw std::invalid_argument("relation path shorter than two arrows");
      if (!path_is_composable(q, t.path))
        throw std::invalid_argument("relation path is not composable");
      if (i > 0 && terms_[i - 1].path == t.path)
        throw std::invalid_argument("relation repeats a path");
      if (path_source(q, t.path) != path_source(q, terms_[0].path) ||
          path_target(q, t.path) != path_target(q, terms_[0].path))
        throw std::invalid_argument("relation terms are not parallel");
    }
  }

  const std::vector<RelTerm>& terms() const { return terms_; }

  /// Single path with a single coefficient.
  bool is_monomial() const { return terms_.size() == 1; }

  bool is_monomial_quadratic() const {
    return is_monomial() && terms_[0].path.arrows.size() == 2;
  }

  bool operator==(const Relation&) const = default;

 private:
  std::vector<RelTerm> terms_;
};

inline std::string relation_to_string(const Relation& r) {
  std::string s;
  for (std::size_t i = 0; i < r.terms().size(); ++i) {
    const RelTerm& t = r.terms()[i];
    Rat c = t.coeff;
    if (i == 0) {
      if (c < 0) s += "-";
    } else {
      s += c < 0 ? " - " : " + ";
    }
    Rat mag = c < 0 ? Rat(-c) : c;
    if (mag != 1) s += rat_to_string(mag) + "*";
    s += path_to_string(t.path);
  }
  return s;
}

/// d: vertex -> dimension, one entry per vertex of the ambient quiver.
using DimVector = std::map<std::string, long long>;
/// theta: vertex -> integer weight, one entry per vertex.
using Weight = std::map<std::string, long long>;

inline void validate_dim_vector(const Quiver& q, const DimVector& d) {
  if (d.size() != q.vertices().size())
    throw std::invalid_argument("dimension vector does not cover the vertex set");
  for (const auto& [v, n] : d) {
    if (!q.has_vertex(v))
      throw std::invalid_argument("dimension vector names unknown vertex '" + v + "'");
    if (n < 0) throw std::invalid_argument("negative dimension at vertex '" + v + "'");
  }
}

inline void validate_weight(const Quiver& q, const Weight& theta) {
  if (theta.size() != q.vertices().size())
    throw std::invalid_argument("weight does not cover the vertex set");
  for (const auto& [v, n] : theta) {
    (void)n;
    if (!q.has_vertex(v))
      throw std::invalid_argument("weight names unknown vertex '" + v + "'");
  }
}

/// Sum of theta(v) * d(v) over the common vertex set.
inline long long theta_pairing(const Weight& theta, const DimVector& d) {
  if (theta.size() != d.size())
    throw std::invalid_argument("weight and dimension vector cover different vertex sets");
  long long sum = 0;
  for (const auto& [v, t] : theta) {
    auto it = d.find(v);
    if (it == d.end())
      throw std::invalid_argument("weight and dimension vector cover different vertex sets");
    sum += t * it->second;
  }
  return sum;
}

namespace detail {

/// Decides whether the quotient of the path algebra by a monomial ideal has
/// unbounded nonzero paths. A path is nonzero iff it avoids every generator
/// as a contiguous subpath, so nonzero paths are walks of an automaton whose
/// state is (current vertex, longest suffix that is a proper generator
/// prefix); unbounded length is a reachable cycle.
inline bool has_unbounded_nonzero_path(const Quiver& q,
                                       const std::vector<Path>& generators) {
  using Prefix = std::vector<std::string>;
  std::set<Prefix> full, proper;
  for (const Path& g : generators) {
    full.insert(g.arrows);
    for (std::size_t j = 1; j < g.arrows.size(); ++j)
      proper.insert(Prefix(g.arrows.begin(), g.arrows.begin() + j));
  }

  // State key: prefix path, empty prefix tagged by the current vertex.
  struct State {
    std::string vertex;
    Prefix suffix;
    bool operator<(const State& o) const {
      return std::tie(vertex, suffix) < std::tie(o.vertex, o.suffix);
    }
  };

  auto step = [&](const State& s, const Arrow& z) -> std::pair<bool, State> {
    Prefix t = s.suffix;
    t.push_back(z.id);
    for (std::size_t drop = 0; drop < t.size(); ++drop) {
      Prefix u(t.begin() + drop, t.end());
      if (full.count(u)) return {false, {}};  // composite hit a generator
    }
    for (std::size_t drop = 0; drop < t.size(); ++drop) {
      Prefix u(t.begin() + drop, t.end());
      if (proper.count(u)) return {true, {z.head, u}};
    }
    return {true, {z.head, {}}};
  };

  // Iterative three-color DFS over reachable states; a back edge is a cycle.
  std::map<State, int> color;  // 0 absent, 1 on stack, 2 done
  for (const std::string& v : q.vertices()) {
    State start{v, {}};
    if (color.count(start)) continue;
    std::vector<std::pair<State, std::size_t>> stack{{start, 0}};
    color[start] = 1;
    while (!stack.empty()) {
      auto& [s, next_arrow] = stack.back();
      std::string at = s.suffix.empty() ? s.vertex : q.arrow(s.suffix.back()).head;
      bool advanced = false;
      while (next_arrow < q.arrows().size()) {
        const Arrow& z = q.arrows()[next_arrow++];
        if (z.tail != at) continue;
        auto [alive, n] = step(s, z);
        if (!alive) continue;
        auto it = color.find(n);
        if (it == color.end()) {
          color[n] = 1;
          stack.push_back({n, 0});
          advanced = true;
          break;
        }
        if (it->second == 1) return true;
      }
      if (!advanced && (stack.back().second >= q.arrows().size())) {
        color[stack.back().first] = 2;
        stack.pop_back();
      }
    }
  }
  return false;
}

}  // namespace detail

/// Which regime a quiver-with-relations object lives in. FiniteDimensional
/// means the quotient algebra is finite-dimensional; CompleteGentle quivers
/// have infinite-dimensional quotients and every vertex locally looks like
/// two matched composition channels.
enum class QuiverKind { FiniteDimensional, CompleteGentle };

struct Verdict {
  bool pass = true;
  std::string axiom;    // failed axiom label, empty on pass
  std::string witness;  // offending vertex/arrows, empty on pass

  explicit operator bool() const { return pass; }
};

inline Verdict verdict_pass() { return {true, "", ""}; }
inline Verdict verdict_fail(std::string axiom, std::string witness) {
  return {false, std::move(axiom), std::move(witness)};
}

class BoundQuiver;
inline Verdict check_complete_gentle(const BoundQuiver& bq);

/// A quiver together with relations. Construction picks the kind: complete
/// gentle when the local axioms hold, finite-dimensional otherwise (verified
/// for monomial relation sets; a monomial quotient that is neither is
/// rejected because nothing downstream can represent it).
class BoundQuiver {
 public:
  static BoundQuiver make(Quiver q, std::vector<Relation> relations);

  const Quiver& quiver() const { return quiver_; }
  const std::vector<Relation>& relations() const { return relations_; }
  QuiverKind kind() const { return kind_; }

  bool all_relations_monomial_quadratic() const {
    for (const Relation& r : relations_)
      if (!r.is_monomial_quadratic()) return false;
    return true;
  }

  /// Membership of the composite then*first among the quadratic monomial
  /// relations ("first acts, then kills").
  bool has_rel2(const std::string& first, const std::string& then) const {
    return rel2_.count({first, then}) != 0;
  }

  bool operator==(const BoundQuiver& o) const {
    return quiver_ == o.quiver_ && relations_ == o.relations_ && kind_ == o.kind_;
  }

 private:
  BoundQuiver(Quiver q, std::vector<Relation> relations, QuiverKind kind)
      : quiver_(std::move(q)), relations_(std::move(relations)), kind_(kind) {
    std::sort(relations_.begin(), relations_.end(),
              [](const Relation& a, const Relation& b) {
                return relation_to_string(a) < relation_to_string(b);
              });
    for (const Relation& r : relations_)
      if (r.is_monomial_quadratic())
        rel2_.insert({r.terms()[0].path.arrows[0], r.terms()[0].path.arrows[1]});
  }

  Quiver quiver_;
  std::vector<Relation> relations_;
  QuiverKind kind_;
  std::set<std::pair<std::string, std::string>> rel2_;

  friend BoundQuiver complete_gentle_closure(const BoundQuiver&);
};

namespace detail {

// SB1: every vertex has at most two incoming and at most two outgoing arrows.
inline Verdict check_sb1(const Quiver& q) {
  for (const std::string& v : q.vertices()) {
    if (q.in_arrows(v).size() > 2)
      return verdict_fail("SB1", "vertex " + v + " has more than two incoming arrows");
    if (q.out_arrows(v).size() > 2)
      return verdict_fail("SB1", "vertex " + v + " has more than two outgoing arrows");
  }
  return verdict_pass();
}

// SB2 for quadratic monomial relation sets: each arrow extends nontrivially
// in at most one way on each side.
inline Verdict check_sb2(const BoundQuiver& bq) {
  const Quiver& q = bq.quiver();
  for (const Arrow& a : q.arrows()) {
    std::vector<std::string> live_before, live_after;
    for (const std::string& b : q.in_arrows(a.tail))
      if (!bq.has_rel2(b, a.id)) live_before.push_back(b);
    for (const std::string& c : q.out_arrows(a.head))
      if (!bq.has_rel2(a.id, c)) live_after.push_back(c);
    if (live_before.size() > 1)
      return verdict_fail("SB2", "arrow " + a.id + " composes with both " +
                                     live_before[0] + " and " + live_before[1]);
    if (live_after.size() > 1)
      return verdict_fail("SB2", "arrows " + live_after[0] + " and " + live_after[1] +
                                     " both compose with " + a.id);
  }
  return verdict_pass();
}

// G1/G2: through any vertex, a parallel pair of arrows on one side meets an
// arrow on the other side in exactly one relation.
inline Verdict check_g1_g2(const BoundQuiver& bq) {
  const Quiver& q = bq.quiver();
  for (const std::string& v : q.vertices()) {
    std::vector<std::string> ins = q.in_arrows(v), outs = q.out_arrows(v);
    if (outs.size() == 2) {
      for (const std::string& b : ins) {
        int hits = int(bq.has_rel2(b, outs[0])) + int(bq.has_rel2(b, outs[1]));
        if (hits != 1)
          return verdict_fail("G1", "arrows " + outs[0] + "," + outs[1] + " out of " + v +
                                        " and " + b + " into it are killed " +
                                        (hits == 0 ? "zero" : "two") + " times");
      }
    }
    if (ins.size() == 2) {
      for (const std::string& a : outs) {
        int hits = int(bq.has_rel2(ins[0], a)) + int(bq.has_rel2(ins[1], a));
        if (hits != 1)
          return verdict_fail("G2", "arrows " + ins[0] + "," + ins[1] + " into " + v +
                                        " and " + a + " out of it are killed " +
                                        (hits == 0 ? "zero" : "two") + " times");
      }
    }
  }
  return verdict_pass();
}

}  // namespace detail

/// SB1 and SB2. Only decidable here when every relation is a single path of
/// length two; anything else raises NonMonomialRelations.
inline Verdict check_special_biserial(const BoundQuiver& bq) {
  for (const Relation& r : bq.relations())
    if (!r.is_monomial_quadratic())
      throw NonMonomialRelations("cannot decide ideal membership for relation '" +
                                 relation_to_string(r) + "'");
  if (Verdict v = detail::check_sb1(bq.quiver()); !v) return v;
  return detail::check_sb2(bq);
}

/// SB1, SB2, G1, G2, G3. A relation that is not a quadratic monomial fails G3
/// rather than raising, so this check never throws.
inline Verdict check_gentle(const BoundQuiver& bq) {
  for (const Relation& r : bq.relations())
    if (!r.is_monomial_quadratic())
      return verdict_fail("G3", "relation '" + relation_to_string(r) +
                                    "' is not a single path of length two");
  if (Verdict v = detail::check_sb1(bq.quiver()); !v) return v;
  // G1/G2 subsume SB2 once SB1 bounds the degrees, so they go first and give
  // the more specific verdict.
  if (Verdict v = detail::check_g1_g2(bq); !v) return v;
  return detail::check_sb2(bq);
}

/// Every vertex has exactly two incoming and two outgoing arrows, and every
/// arrow has exactly one killing partner on each side.
inline Verdict check_complete_gentle(const BoundQuiver& bq) {
  for (const Relation& r : bq.relations())
    if (!r.is_monomial_quadratic())
      return verdict_fail("CG-relations", "relation '" + relation_to_string(r) +
                                              "' is not a single path of length two");
  const Quiver& q = bq.quiver();
  for (const std::string& v : q.vertices()) {
    if (q.in_arrows(v).size() != 2)
      return verdict_fail("CG-degrees", "vertex " + v + " has " +
                                            std::to_string(q.in_arrows(v).size()) +
                                            " incoming arrows, not 2");
    if (q.out_arrows(v).size() != 2)
      return verdict_fail("CG-degrees", "vertex " + v + " has " +
                                            std::to_string(q.out_arrows(v).size()) +
                                            " outgoing arrows, not 2");
  }
  for (const Arrow& a : q.arrows()) {
    int before = 0, after = 0;
    for (const std::string& b : q.in_arrows(a.tail))
      if (bq.has_rel2(b, a.id)) ++before;
    for (const std::string& c : q.out_arrows(a.head))
      if (bq.has_rel2(a.id, c)) ++after;
    if (after != 1)
      return verdict_fail("CG-partners", "arrow " + a.id + " has " +
                                             std::to_string(after) +
                                             " killing partners after it, not 1");
    if (before != 1)
      return verdict_fail("CG-partners", "arrow " + a.id + " has " +
                                             std::to_string(before) +
                                             " killing partners before it, not 1");
  }
  return verdict_pass();
}

inline BoundQuiver BoundQuiver::make(Quiver q, std::vector<Relation> relations) {
  for (const Relation& r : relations)
    for (const RelTerm& t : r.terms())
      if (!path_is_composable(q, t.path))
        throw std::invalid_argument("relation '" + relation_to_string(r) +
                                    "' does not fit the quiver");
  BoundQuiver probe(q, relations, QuiverKind::FiniteDimensional);
  if (check_complete_gentle(probe))
    return BoundQuiver(std::move(q), std::move(relations), QuiverKind::CompleteGentle);
  bool monomial = true;
  std::vector<Path> generators;
  for (const Relation& r : relations) {
    if (r.is_monomial())
      generators.push_back(r.terms()[0].path);
    else
      monomial = false;
  }
  if (monomial && detail::has_unbounded_nonzero_path(q, generators))
    throw DomainError(
        "quotient algebra is infinite-dimensional but not complete gentle");
  return BoundQuiver(std::move(q), std::move(relations), QuiverKind::FiniteDimensional);
}

/// Embeds a gentle quiver with relations into a complete gentle one over the
/// same vertex set by adding 2|Q_0| - |Q_1| arrows named w1, w2, ... and the
/// matching relations. Deterministic: ties break lexicographically, and pairs
/// of distinct vertices are preferred to loops when choosing where the next
/// arrow goes. Complete inputs pass through unchanged.
inline BoundQuiver complete_gentle_closure(const BoundQuiver& bq) {
  if (Verdict v = check_gentle(bq); !v)
    throw DomainError("completion requires a gentle input, but " + v.axiom +
                      " fails: " + v.witness);

  std::vector<std::string> verts = bq.quiver().vertices();
  std::vector<Arrow> arrows = bq.quiver().arrows();
  std::set<std::pair<std::string, std::string>> rel2 = bq.rel2_;

  std::set<std::string> used_ids;
  for (const Arrow& a : arrows) used_ids.insert(a.id);
  int fresh_counter = 1;
  auto fresh_name = [&] {
    std::string name;
    do {
      name = "w" + std::to_string(fresh_counter++);
    } while (used_ids.count(name));
    used_ids.insert(name);
    return name;
  };

  auto out_of = [&](const std::string& v) {
    std::vector<std::string> r;
    for (const Arrow& a : arrows)
      if (a.tail == v) r.push_back(a.id);
    std::sort(r.begin(), r.end());
    return r;
  };
  auto in_of = [&](const std::string& v) {
    std::vector<std::string> r;
    for (const Arrow& a : arrows)
      if (a.head == v) r.push_back(a.id);
    std::sort(r.begin(), r.end());
    return r;
  };

  while (arrows.size() < 2 * verts.size()) {
    // Lexicographically first (x, y) with spare out-capacity at x and spare
    // in-capacity at y; a pair with x != y wins over a loop.
    std::string x, y;
    bool found = false, found_nonloop = false;
    for (const std::string& cx : verts) {
      if (out_of(cx).size() > 1) continue;
      for (const std::string& cy : verts) {
        if (in_of(cy).size() > 1) continue;
        bool nonloop = cx != cy;
        if (!found || (nonloop && !found_nonloop)) {
          x = cx;
          y = cy;
          found = true;
          found_nonloop = nonloop;
          if (nonloop) break;
        }
      }
      if (found_nonloop) break;
    }
    if (!found) throw CompletionFailed("no vertex with spare capacity");

    std::vector<std::string> old_out_x = out_of(x), old_in_x = in_of(x);
    std::vector<std::string> old_in_y = in_of(y), old_out_y = out_of(y);

    std::string c = fresh_name();
    arrows.push_back({c, x, y});

    // Relations c*a' for incoming a' at x: everything the unique existing
    // outgoing arrow does not already kill must be killed by c, and when x
    // had no outgoing arrow, c kills exactly one incoming arrow.
    if (old_out_x.size() == 1) {
      const std::string& a = old_out_x[0];
      for (const std::string& ap : old_in_x)
        if (!rel2.count({ap, a})) rel2.insert({ap, c});
    } else if (old_out_x.empty() && old_in_x.size() == 2) {
      rel2.insert({old_in_x[0], c});
    }

    // Mirror image at y for relations b'*c.
    if (old_in_y.size() == 1) {
      const std::string& b = old_in_y[0];
      for (const std::string& bp : old_out_y)
        if (!rel2.count({b, bp})) rel2.insert({c, bp});
    } else if (old_in_y.empty() && old_out_y.size() == 2) {
      rel2.insert({c, old_out_y[0]});
    }
  }

  // Matching pass: at every vertex the relations through it must pair the two
  // incoming with the two outgoing arrows; extend the partial pairing in
  // sorted order.
  for (const std::string& v : verts) {
    std::vector<std::string> ins = in_of(v), outs = out_of(v);
    std::set<std::string> matched_in, matched_out;
    for (const std::string& i : ins) {
      for (const std::string& o : outs) {
        if (!rel2.count({i, o})) continue;
        if (matched_in.count(i) || matched_out.count(o))
          throw CompletionFailed("relations through vertex " + v +
                                 " do not form a matching");
        matched_in.insert(i);
        matched_out.insert(o);
      }
    }
    std::vector<std::string> free_in, free_out;
    for (const std::string& i : ins)
      if (!matched_in.count(i)) free_in.push_back(i);
    for (const std::string& o : outs)
      if (!matched_out.count(o)) free_out.push_back(o);
    if (free_in.size() != free_out.size())
      throw CompletionFailed("unbalanced unmatched arrows at vertex " + v);
    for (std::size_t k = 0; k < free_in.size(); ++k)
      rel2.insert({free_in[k], free_out[k]});
  }

  Quiver done(verts, arrows);
  std::vector<Relation> rels;
  for (const auto& [first, then] : rel2)
    rels.push_back(Relation(done, {{Rat(1), Path{{first, then}}}}));
  BoundQuiver result = BoundQuiver::make(std::move(done), std::move(rels));
  if (Verdict v = check_complete_gentle(result); !v)
    throw CompletionFailed("completion left " + v.axiom + " unsatisfied: " + v.witness);
  return result;
}

/// Partition of the arrow set into cycles a_1, ..., a_n (application order,
/// each listed from its smallest arrow) where every composite a_{i+1}*a_i and
/// the wrap-around a_1*a_n are relations.
inline std::vector<std::vector<std::string>> effective_cycles(const BoundQuiver& bq) {
  if (Verdict v = check_complete_gentle(bq); !v)
    throw NotCompleteGentle("effective cycles need a complete gentle input, but " +
                            v.axiom + " fails: " + v.witness);
  const Quiver& q = bq.quiver();
  // successor(a): the unique z with z*a a relation
  auto successor = [&](const std::string& a) -> std::string {
    for (const std::string& z : q.out_arrows(q.arrow(a).head))
      if (bq.has_rel2(a, z)) return z;
    throw NotCompleteGentle("arrow " + a + " has no killing successor");
  };
  std::set<std::string> visited;
  std::vector<std::vector<std::string>> cycles;
  for (const Arrow& a : q.arrows()) {
    if (visited.count(a.id)) continue;
    std::vector<std::string> cycle;
    std::string cur = a.id;
    do {
      cycle.push_back(cur);
      visited.insert(cur);
      cur = successor(cur);
    } while (cur != a.id);
    cycles.push_back(std::move(cycle));
  }
  return cycles;
}

}  // namespace biserial
