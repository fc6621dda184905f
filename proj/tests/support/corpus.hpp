#pragma once

// Small quivers shared across test suites.

#include <string>
#include <vector>

#include <biserial/quiver.hpp>

namespace corpus {

using biserial::Arrow;
using biserial::BoundQuiver;
using biserial::Path;
using biserial::Quiver;
using biserial::Rat;
using biserial::Relation;

// first acts, then "then" kills: the composite then*first
inline Relation rel2(const Quiver& q, const std::string& first, const std::string& then) {
  return Relation(q, {{Rat(1), Path{{first, then}}}});
}

/// Single vertex v, loop a, relation a*a.
inline BoundQuiver one_loop() {
  Quiver q({"v"}, {{"a", "v", "v"}});
  return BoundQuiver::make(q, {rel2(q, "a", "a")});
}

/// Vertices 1,2 and parallel arrows a,b from 1 to 2, no relations.
inline BoundQuiver kronecker() {
  Quiver q({"1", "2"}, {{"a", "1", "2"}, {"b", "1", "2"}});
  return BoundQuiver::make(q, {});
}

/// Oriented cycle on l vertices 0..l-1 with arrows a0..a_{l-1} and every
/// length-two composite killed.
inline BoundQuiver cyclic(int l) {
  std::vector<std::string> verts;
  std::vector<Arrow> arrows;
  for (int i = 0; i < l; ++i) {
    verts.push_back(std::to_string(i));
    arrows.push_back({"a" + std::to_string(i), std::to_string(i),
                      std::to_string((i + 1) % l)});
  }
  Quiver q(verts, arrows);
  std::vector<Relation> rels;
  for (int i = 0; i < l; ++i)
    rels.push_back(rel2(q, "a" + std::to_string(i), "a" + std::to_string((i + 1) % l)));
  return BoundQuiver::make(q, rels);
}

/// Linear quiver 1 -> 2 -> ... -> n. With alternating = true the composites
/// a2*a1, a4*a3, ... are killed; otherwise there are no relations.
inline BoundQuiver linear_an(int n, bool alternating) {
  std::vector<std::string> verts;
  std::vector<Arrow> arrows;
  for (int i = 1; i <= n; ++i) verts.push_back(std::to_string(i));
  for (int i = 1; i < n; ++i)
    arrows.push_back({"a" + std::to_string(i), std::to_string(i),
                      std::to_string(i + 1)});
  Quiver q(verts, arrows);
  std::vector<Relation> rels;
  if (alternating)
    for (int i = 1; i + 1 < n; i += 2)
      rels.push_back(rel2(q, "a" + std::to_string(i), "a" + std::to_string(i + 1)));
  return BoundQuiver::make(q, rels);
}

/// One vertex, two loops a,b, relations a*a and b*b. Already complete gentle.
inline BoundQuiver two_loops() {
  Quiver q({"v"}, {{"a", "v", "v"}, {"b", "v", "v"}});
  return BoundQuiver::make(q, {rel2(q, "a", "a"), rel2(q, "b", "b")});
}

/// The completion corpus used by several suites.
inline std::vector<std::pair<std::string, BoundQuiver>> completion_corpus() {
  std::vector<std::pair<std::string, BoundQuiver>> out;
  out.emplace_back("one-loop", one_loop());
  out.emplace_back("kronecker", kronecker());
  for (int l = 2; l <= 4; ++l)
    out.emplace_back("cyclic-" + std::to_string(l), cyclic(l));
  for (int n = 2; n <= 4; ++n) {
    out.emplace_back("linear-" + std::to_string(n) + "-free", linear_an(n, false));
    out.emplace_back("linear-" + std::to_string(n) + "-alt", linear_an(n, true));
  }
  return out;
}

}  // namespace corpus
