#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <biserial/errors.hpp>
#include <biserial/quiver.hpp>
#include <biserial/rational.hpp>

namespace biserial {

/// Parsed form of a quiver description file: the quiver, its relations, and
/// the optional dimension vector and weight blocks.
struct QuiverFile {
  std::string name;
  Quiver quiver;
  std::vector<Relation> relations;
  std::optional<DimVector> dim;
  std::optional<Weight> theta;

  bool operator==(const QuiverFile&) const = default;
};

namespace ioetail {

struct Token {
  std::string text;
  std::size_t column;  // 1-based
};

inline std::vector<Token> split_ws(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

inline bool looks_like_number(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = s[0] == '-' || s[0] == '+' ? 1 : 0;
  if (i == s.size()) return false;
  bool saw_slash = false;
  for (; i < s.size(); ++i) {
    if (s[i] == '/' && !saw_slash && i + 1 < s.size()) {
      saw_slash = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

}  // namespace ioetail

/// Parses the line-oriented quiver format:
///
///   quiver <name>
///   vertex <id>
///   arrow <id> : <tail> -> <head>
///   rel <term> [+ <term> | - <term>]...
///   dim <v>=<n> ...
///   theta <v>=<n> ...
///
/// '#' starts a comment. A term is an optional rational coefficient and a
/// '*'-separated arrow sequence read right-to-left (the rightmost arrow acts
/// first). Vertices must be declared before arrows use them, arrows before
/// relations use them.
inline QuiverFile parse_quiver_file(const std::string& text) {
  std::optional<std::string> name;
  std::vector<std::string> vertices;
  std::vector<Arrow> arrows;
  std::map<std::string, Arrow> arrow_by_id;
  std::map<std::string, std::size_t> vertex_set;
  // raw relation data: (line, col, list of (coeff, textual path))
  struct RawRel {
    std::size_t line;
    std::vector<std::pair<Rat, std::vector<std::string>>> terms;
  };
  std::vector<RawRel> raw_rels;
  std::optional<DimVector> dim;
  std::optional<Weight> theta;

  std::istringstream in(text);
  std::string line;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    auto toks = ioetail::split_ws(line);
    if (toks.empty()) continue;
    const std::string& head = toks[0].text;

    auto need = [&](std::size_t count, const char* what) {
      if (toks.size() != count)
        throw ParseError(ln, toks[0].column, std::string("expected '") + what + "'");
    };

    if (head == "quiver") {
      need(2, "quiver <name>");
      if (name) throw ParseError(ln, toks[0].column, "duplicate quiver line");
      name = toks[1].text;
    } else if (head == "vertex") {
      need(2, "vertex <id>");
      if (vertex_set.count(toks[1].text))
        throw ParseError(ln, toks[1].column, "duplicate vertex '" + toks[1].text + "'");
      vertex_set[toks[1].text] = vertices.size();
      vertices.push_back(toks[1].text);
    } else if (head == "arrow") {
      need(6, "arrow <id> : <tail> -> <head>");
      if (toks[2].text != ":") throw ParseError(ln, toks[2].column, "expected ':'");
      if (toks[4].text != "->") throw ParseError(ln, toks[4].column, "expected '->'");
      const std::string& id = toks[1].text;
      if (arrow_by_id.count(id))
        throw ParseError(ln, toks[1].column, "duplicate arrow '" + id + "'");
      if (!vertex_set.count(toks[3].text))
        throw ParseError(ln, toks[3].column, "unknown vertex '" + toks[3].text + "'");
      if (!vertex_set.count(toks[5].text))
        throw ParseError(ln, toks[5].column, "unknown vertex '" + toks[5].text + "'");
      Arrow a{id, toks[3].text, toks[5].text};
      arrow_by_id[id] = a;
      arrows.push_back(a);
    } else if (head == "rel") {
      if (toks.size() < 2) throw ParseError(ln, toks[0].column, "relation with no terms");
      RawRel raw{ln, {}};
      Rat sign(1);
      for (std::size_t t = 1; t < toks.size(); ++t) {
        if (toks[t].text == "+" || toks[t].text == "-") {
          throw ParseError(ln, toks[t].column, "dangling sign");
        }
        // parse one term
        std::vector<std::string> factors;
        std::size_t pos = 0;
        const std::string& term = toks[t].text;
        while (pos <= term.size()) {
          std::size_t star = term.find('*', pos);
          std::string piece = term.substr(pos, star == std::string::npos
                                                   ? std::string::npos
                                                   : star - pos);
          if (piece.empty())
            throw ParseError(ln, toks[t].column + pos, "empty factor in term");
          factors.push_back(piece);
          if (star == std::string::npos) break;
          pos = star + 1;
        }
        Rat coeff = sign;
        std::size_t first_factor = 0;
        if (ioetail::looks_like_number(factors[0]) && !arrow_by_id.count(factors[0])) {
          if (factors.size() == 1)
            throw ParseError(ln, toks[t].column, "term without arrows");
          try {
            coeff = sign * rat_from_string(factors[0]);
          } catch (const std::exception&) {
            throw ParseError(ln, toks[t].column, "bad coefficient '" + factors[0] + "'");
          }
          first_factor = 1;
        }
        std::vector<std::string> path;  // application order: reverse of text
        for (std::size_t f = factors.size(); f > first_factor; --f) {
          const std::string& id = factors[f - 1];
          if (!arrow_by_id.count(id))
            throw ParseError(ln, toks[t].column, "unknown arrow '" + id + "'");
          path.push_back(id);
        }
        raw.terms.push_back({coeff, std::move(path)});

        // separator or end
        if (t + 1 < toks.size()) {
          ++t;
          if (toks[t].text == "+")
            sign = Rat(1);
          else if (toks[t].text == "-")
            sign = Rat(-1);
          else
            throw ParseError(ln, toks[t].column, "expected '+' or '-' between terms");
          if (t + 1 == toks.size())
            throw ParseError(ln, toks[t].column, "dangling sign");
        }
      }
      raw_rels.push_back(std::move(raw));
    } else if (head == "dim" || head == "theta") {
      bool is_dim = head == "dim";
      if (toks.size() < 2)
        throw ParseError(ln, toks[0].column, "expected at least one <v>=<n>");
      auto& block = is_dim ? dim : theta;
      if (!block) block.emplace();
      for (std::size_t t = 1; t < toks.size(); ++t) {
        auto eq = toks[t].text.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == toks[t].text.size())
          throw ParseError(ln, toks[t].column, "expected <v>=<n>");
        std::string v = toks[t].text.substr(0, eq);
        std::string n = toks[t].text.substr(eq + 1);
        if (!vertex_set.count(v))
          throw ParseError(ln, toks[t].column, "unknown vertex '" + v + "'");
        if (block->count(v))
          throw ParseError(ln, toks[t].column, "duplicate entry for vertex '" + v + "'");
        try {
          std::size_t used = 0;
          long long value = std::stoll(n, &used);
          if (used != n.size()) throw std::invalid_argument(n);
          if (is_dim && value < 0)
            throw ParseError(ln, toks[t].column, "negative dimension");
          (*block)[v] = value;
        } catch (const ParseError&) {
          throw;
        } catch (const std::exception&) {
          throw ParseError(ln, toks[t].column, "bad integer '" + n + "'");
        }
      }
    } else {
      throw ParseError(ln, toks[0].column, "unknown declaration '" + head + "'");
    }
  }

  if (!name) throw ParseError(1, 1, "missing 'quiver <name>' line");

  QuiverFile out;
  out.name = *name;
  out.quiver = Quiver(vertices, arrows);
  for (const RawRel& raw : raw_rels) {
    std::vector<RelTerm> terms;
    for (const auto& [coeff, path] : raw.terms) terms.push_back({coeff, Path{path}});
    try {
      out.relations.push_back(Relation(out.quiver, std::move(terms)));
    } catch (const std::invalid_argument& e) {
      throw ParseError(raw.line, 1, e.what());
    }
  }
  std::sort(out.relations.begin(), out.relations.end(),
            [](const Relation& a, const Relation& b) {
              return relation_to_string(a) < relation_to_string(b);
            });
  if (dim) {
    for (const std::string& v : out.quiver.vertices())
      if (!dim->count(v))
        throw ParseError(ln ? ln : 1, 1, "dim block misses vertex '" + v + "'");
    out.dim = std::move(dim);
  }
  if (theta) {
    for (const std::string& v : out.quiver.vertices())
      if (!theta->count(v))
        throw ParseError(ln ? ln : 1, 1, "theta block misses vertex '" + v + "'");
    out.theta = std::move(theta);
  }
  return out;
}

/// Canonical rendering: vertices, then arrows, then relations, each sorted,
/// then dim and theta. parse(print(f)) reproduces f up to canonical order.
inline std::string print_quiver_file(const QuiverFile& f) {
  std::string s = "quiver " + f.name + "\n";
  for (const std::string& v : f.quiver.vertices()) s += "vertex " + v + "\n";
  for (const Arrow& a : f.quiver.arrows())
    s += "arrow " + a.id + " : " + a.tail + " -> " + a.head + "\n";
  std::vector<std::string> rels;
  for (const Relation& r : f.relations) rels.push_back(relation_to_string(r));
  std::sort(rels.begin(), rels.end());
  for (const std::string& r : rels) s += "rel " + r + "\n";
  auto block = [&](const char* keyword, const std::map<std::string, long long>& m) {
    s += keyword;
    for (const auto& [v, n] : m) s += " " + v + "=" + std::to_string(n);
    s += "\n";
  };
  if (f.dim) block("dim", *f.dim);
  if (f.theta) block("theta", *f.theta);
  return s;
}

inline BoundQuiver to_bound_quiver(const QuiverFile& f) {
  return BoundQuiver::make(f.quiver, f.relations);
}

inline QuiverFile from_bound_quiver(const std::string& name, const BoundQuiver& bq) {
  QuiverFile f;
  f.name = name;
  f.quiver = bq.quiver();
  f.relations = bq.relations();
  return f;
}

}  // namespace biserial
