#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "biserial/endo.hpp"
#include "biserial/errors.hpp"
#include "biserial/matrix.hpp"
#include "biserial/polynomial.hpp"
#include "biserial/quiver.hpp"
#include "biserial/rational.hpp"
#include "biserial/representation.hpp"
#include "biserial/rng.hpp"

namespace biserial {

/// One step of a walk: an arrow traversed forward (direct) or backward.
struct Letter {
  std::string arrow;
  bool inverse = false;

  friend bool operator==(const Letter&, const Letter&) = default;
  friend bool operator<(const Letter& a, const Letter& b) {
    return std::tie(a.arrow, a.inverse) < std::tie(b.arrow, b.inverse);
  }
};

inline Letter flipped(const Letter& l) { return Letter{l.arrow, !l.inverse}; }

inline std::string letter_to_string(const Letter& l) {
  return l.inverse ? l.arrow + "^-1" : l.arrow;
}

/// Dot-separated rendering, `^-1` marking inverse letters. Empty for the
/// trivial walk.
inline std::string word_to_string(const std::vector<Letter>& letters) {
  std::string out;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (i > 0) out += '.';
    out += letter_to_string(letters[i]);
  }
  return out;
}

/// Parses the dot-separated format back into letters.
inline std::vector<Letter> letters_from_string(const BoundQuiver& bq, const std::string& text) {
  std::vector<Letter> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t dot = text.find('.', pos);
    std::string token = text.substr(pos, dot == std::string::npos ? dot : dot - pos);
    if (token.empty()) throw std::invalid_argument("word parse: empty letter token");
    Letter l;
    if (token.size() > 3 && token.substr(token.size() - 3) == "^-1") {
      l.arrow = token.substr(0, token.size() - 3);
      l.inverse = true;
    } else {
      l.arrow = token;
    }
    if (!bq.quiver().has_arrow(l.arrow))
      throw std::invalid_argument("word parse: unknown arrow " + l.arrow);
    out.push_back(std::move(l));
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return out;
}

namespace detail {

inline std::string walk_step_source(const Quiver& q, const Letter& l) {
  const Arrow& a = q.arrow(l.arrow);
  return l.inverse ? a.head : a.tail;
}

inline std::string walk_step_target(const Quiver& q, const Letter& l) {
  const Arrow& a = q.arrow(l.arrow);
  return l.inverse ? a.tail : a.head;
}

/// Reducedness of a consecutive pair: never a letter then its inverse, never
/// two direct letters composing into a relation, never two inverse letters
/// whose reversal composes into a relation.
inline bool reduced_pair(const BoundQuiver& bq, const Letter& a, const Letter& b) {
  if (a.arrow == b.arrow && a.inverse != b.inverse) return false;
  if (!a.inverse && !b.inverse && bq.has_rel2(a.arrow, b.arrow)) return false;
  if (a.inverse && b.inverse && bq.has_rel2(b.arrow, a.arrow)) return false;
  return true;
}

inline std::vector<Letter> inverse_walk(const std::vector<Letter>& letters) {
  std::vector<Letter> out;
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) out.push_back(flipped(*it));
  return out;
}

inline void require_string_algebra(const BoundQuiver& bq) {
  if (!check_gentle(bq) && !check_complete_gentle(bq))
    throw std::invalid_argument("word enumeration requires a gentle or complete gentle algebra");
}

}  // namespace detail

/// A reduced walk on the quiver. The empty walk is the trivial string at its
/// start vertex.
class StringWord {
 public:
  StringWord(std::shared_ptr<const BoundQuiver> algebra, std::string start,
             std::vector<Letter> letters)
      : algebra_(std::move(algebra)), letters_(std::move(letters)) {
    if (!algebra_) throw std::invalid_argument("string word: null algebra");
    const Quiver& q = algebra_->quiver();
    if (!letters_.empty()) start = detail::walk_step_source(q, letters_[0]);
    bool known = false;
    for (const std::string& v : q.vertices()) known = known || v == start;
    if (!known) throw std::invalid_argument("string word: unknown start vertex " + start);
    positions_.push_back(start);
    for (std::size_t i = 0; i < letters_.size(); ++i) {
      const Letter& l = letters_[i];
      if (!q.has_arrow(l.arrow))
        throw std::invalid_argument("string word: unknown arrow " + l.arrow);
      if (detail::walk_step_source(q, l) != positions_.back())
        throw std::invalid_argument("string word: walk is not connected at step " +
                                    std::to_string(i));
      if (i > 0 && !detail::reduced_pair(*algebra_, letters_[i - 1], l))
        throw std::invalid_argument("string word: walk is not reduced at step " +
                                    std::to_string(i));
      positions_.push_back(detail::walk_step_target(q, l));
    }
  }

  const std::shared_ptr<const BoundQuiver>& algebra() const { return algebra_; }
  const std::vector<Letter>& letters() const { return letters_; }
  /// Visited vertices, one more than there are letters.
  const std::vector<std::string>& positions() const { return positions_; }
  long long length() const { return static_cast<long long>(letters_.size()); }

  DimVector dim_vector() const {
    DimVector d;
    for (const std::string& v : algebra_->quiver().vertices()) d[v] = 0;
    for (const std::string& p : positions_) ++d[p];
    return d;
  }

 private:
  std::shared_ptr<const BoundQuiver> algebra_;
  std::vector<Letter> letters_;
  std::vector<std::string> positions_;
};

/// A cyclically reduced primitive closed walk with letters in both
/// directions, stored as the lexicographically least representative among its
/// rotations and the rotations of its inverse.
class BandWord {
 public:
  BandWord(std::shared_ptr<const BoundQuiver> algebra, std::vector<Letter> letters)
      : algebra_(std::move(algebra)) {
    if (!algebra_) throw std::invalid_argument("band word: null algebra");
    if (letters.empty()) throw std::invalid_argument("band word: empty");
    const Quiver& q = algebra_->quiver();
    bool direct = false, inverse = false;
    for (const Letter& l : letters) {
      if (!q.has_arrow(l.arrow)) throw std::invalid_argument("band word: unknown arrow " + l.arrow);
      (l.inverse ? inverse : direct) = true;
    }
    if (!direct || !inverse)
      throw std::invalid_argument("band word: needs letters in both directions");
    std::size_t k = letters.size();
    for (std::size_t i = 0; i < k; ++i) {
      const Letter& cur = letters[i];
      const Letter& nxt = letters[(i + 1) % k];
      if (detail::walk_step_target(q, cur) != detail::walk_step_source(q, nxt))
        throw std::invalid_argument("band word: walk does not close up");
      if (!detail::reduced_pair(*algebra_, cur, nxt))
        throw std::invalid_argument("band word: not cyclically reduced");
    }
    for (std::size_t d = 1; d < k; ++d) {
      if (k % d != 0) continue;
      bool power = true;
      for (std::size_t i = 0; i < k && power; ++i) power = letters[i] == letters[(i + d) % k];
      if (power) throw std::invalid_argument("band word: not primitive");
    }

    // Normal form: least rotation of the word or of its inverse cycle.
    std::vector<Letter> best = letters;
    auto consider = [&](const std::vector<Letter>& w) {
      for (std::size_t r = 0; r < w.size(); ++r) {
        std::vector<Letter> rot(w.begin() + static_cast<std::ptrdiff_t>(r), w.end());
        rot.insert(rot.end(), w.begin(), w.begin() + static_cast<std::ptrdiff_t>(r));
        if (rot < best) best = rot;
      }
    };
    consider(letters);
    consider(detail::inverse_walk(letters));
    letters_ = std::move(best);
    for (std::size_t i = 0; i < k; ++i)
      positions_.push_back(detail::walk_step_source(q, letters_[i]));
  }

  const std::shared_ptr<const BoundQuiver>& algebra() const { return algebra_; }
  const std::vector<Letter>& letters() const { return letters_; }
  /// Source vertex of each letter; the walk returns to positions()[0].
  const std::vector<std::string>& positions() const { return positions_; }
  long long length() const { return static_cast<long long>(letters_.size()); }

  DimVector dim_vector(long long mult = 1) const {
    DimVector d;
    for (const std::string& v : algebra_->quiver().vertices()) d[v] = 0;
    for (const std::string& p : positions_) d[p] += mult;
    return d;
  }

  friend bool operator==(const BandWord& a, const BandWord& b) { return a.letters_ == b.letters_; }

 private:
  std::shared_ptr<const BoundQuiver> algebra_;
  std::vector<Letter> letters_;
  std::vector<std::string> positions_;
};

/// All reduced walks with module dimension at most the bound, up to
/// inversion, trivial walks included. Ordered by length then rendering.
inline std::vector<StringWord> enumerate_strings(std::shared_ptr<const BoundQuiver> algebra,
                                                 long long max_total_dim) {
  detail::require_string_algebra(*algebra);
  std::vector<StringWord> out;
  if (max_total_dim < 1) return out;
  const Quiver& q = algebra->quiver();
  for (const std::string& v : q.vertices()) out.emplace_back(algebra, v, std::vector<Letter>{});

  std::set<std::string> seen;
  std::vector<std::pair<long long, std::string>> order;
  std::map<std::string, std::vector<Letter>> found;
  std::vector<Letter> walk;

  auto extensions = [&](const std::string& at) {
    std::vector<Letter> exts;
    for (const Arrow& a : q.arrows()) {
      if (a.tail == at) exts.push_back(Letter{a.id, false});
      if (a.head == at) exts.push_back(Letter{a.id, true});
    }
    std::sort(exts.begin(), exts.end());
    return exts;
  };

  auto dfs = [&](auto&& self, const std::string& at) -> void {
    if (static_cast<long long>(walk.size()) + 1 >= max_total_dim) return;
    for (const Letter& l : extensions(at)) {
      if (!walk.empty() && !detail::reduced_pair(*algebra, walk.back(), l)) continue;
      walk.push_back(l);
      std::string fwd = word_to_string(walk);
      std::string rev = word_to_string(detail::inverse_walk(walk));
      const std::string& key = std::min(fwd, rev);
      if (seen.insert(key).second) {
        found.emplace(key, fwd <= rev ? walk : detail::inverse_walk(walk));
        order.emplace_back(static_cast<long long>(walk.size()), key);
      }
      self(self, detail::walk_step_target(q, l));
      walk.pop_back();
    }
  };
  for (const std::string& v : q.vertices()) dfs(dfs, v);

  std::sort(order.begin(), order.end());
  for (const auto& [len, key] : order) {
    const std::vector<Letter>& letters = found.at(key);
    out.emplace_back(algebra, detail::walk_step_source(q, letters[0]), letters);
  }
  return out;
}

/// All normalized band words with module dimension at most the bound,
/// ordered by length then rendering.
inline std::vector<BandWord> enumerate_bands(std::shared_ptr<const BoundQuiver> algebra,
                                             long long max_total_dim) {
  detail::require_string_algebra(*algebra);
  std::vector<BandWord> out;
  if (max_total_dim < 2) return out;
  const Quiver& q = algebra->quiver();

  std::set<std::string> seen;
  std::vector<std::pair<long long, std::string>> order;
  std::map<std::string, BandWord> found;
  std::vector<Letter> walk;

  auto dfs = [&](auto&& self, const std::string& start, const std::string& at) -> void {
    if (static_cast<long long>(walk.size()) >= max_total_dim) return;
    std::vector<Letter> exts;
    for (const Arrow& a : q.arrows()) {
      if (a.tail == at) exts.push_back(Letter{a.id, false});
      if (a.head == at) exts.push_back(Letter{a.id, true});
    }
    std::sort(exts.begin(), exts.end());
    for (const Letter& l : exts) {
      if (!walk.empty() && !detail::reduced_pair(*algebra, walk.back(), l)) continue;
      walk.push_back(l);
      if (walk.size() >= 2 && detail::walk_step_target(q, l) == start) {
        bool direct = false, inverse = false;
        for (const Letter& x : walk) (x.inverse ? inverse : direct) = true;
        if (direct && inverse && detail::reduced_pair(*algebra, walk.back(), walk.front())) {
          bool primitive = true;
          for (std::size_t d = 1; d < walk.size() && primitive; ++d) {
            if (walk.size() % d != 0) continue;
            bool power = true;
            for (std::size_t i = 0; i < walk.size() && power; ++i)
              power = walk[i] == walk[(i + d) % walk.size()];
            primitive = !power;
          }
          if (primitive) {
            BandWord b(algebra, walk);
            std::string key = word_to_string(b.letters());
            if (seen.insert(key).second) {
              found.emplace(key, b);
              order.emplace_back(b.length(), key);
            }
          }
        }
      }
      self(self, start, detail::walk_step_target(q, l));
      walk.pop_back();
    }
  };
  for (const std::string& v : q.vertices()) dfs(dfs, v, v);

  std::sort(order.begin(), order.end());
  for (const auto& [len, key] : order) out.push_back(found.at(key));
  return out;
}

/// Module of a string word: one basis vector per walk position, direct
/// letters acting as identities along the walk.
inline Representation<Rat> string_module(const StringWord& w) {
  FieldCtx<Rat> ctx;
  const Quiver& q = w.algebra()->quiver();
  DimVector d = w.dim_vector();
  std::map<std::string, long long> counter;
  std::vector<long long> index;  // basis slot of each position within its vertex
  for (const std::string& p : w.positions()) index.push_back(counter[p]++);

  std::map<std::string, Matrix<Rat>> mats;
  for (const Arrow& a : q.arrows())
    mats.emplace(a.id, Matrix<Rat>(static_cast<std::size_t>(d.at(a.head)),
                                   static_cast<std::size_t>(d.at(a.tail)), ctx));
  for (std::size_t i = 0; i < w.letters().size(); ++i) {
    const Letter& l = w.letters()[i];
    Matrix<Rat>& m = mats.at(l.arrow);
    if (!l.inverse)
      m.at(static_cast<std::size_t>(index[i + 1]), static_cast<std::size_t>(index[i])) = ctx.one();
    else
      m.at(static_cast<std::size_t>(index[i]), static_cast<std::size_t>(index[i + 1])) = ctx.one();
  }
  return Representation<Rat>(w.algebra(), d, mats, ctx);
}

/// Module of a band word: a block of the given multiplicity per position,
/// identities along the walk except for the last letter, which carries the
/// Jordan block of the parameter.
inline Representation<Rat> band_module(const BandWord& b, const Rat& lambda, long long mult = 1) {
  if (is_zero(lambda)) throw DomainError("band module: parameter must be nonzero");
  if (mult < 1) throw std::invalid_argument("band module: multiplicity must be positive");
  FieldCtx<Rat> ctx;
  const Quiver& q = b.algebra()->quiver();
  DimVector d = b.dim_vector(mult);

  std::map<std::string, long long> counter;
  std::vector<long long> base;  // first basis slot of each position block
  for (const std::string& p : b.positions()) {
    base.push_back(counter[p] * mult);
    ++counter[p];
  }

  Matrix<Rat> ident = Matrix<Rat>::identity(static_cast<std::size_t>(mult), ctx);
  Matrix<Rat> jordan(static_cast<std::size_t>(mult), static_cast<std::size_t>(mult), ctx);
  for (long long i = 0; i < mult; ++i) {
    jordan.at(static_cast<std::size_t>(i), static_cast<std::size_t>(i)) = lambda;
    if (i > 0) jordan.at(static_cast<std::size_t>(i), static_cast<std::size_t>(i - 1)) = ctx.one();
  }

  std::map<std::string, Matrix<Rat>> mats;
  for (const Arrow& a : q.arrows())
    mats.emplace(a.id, Matrix<Rat>(static_cast<std::size_t>(d.at(a.head)),
                                   static_cast<std::size_t>(d.at(a.tail)), ctx));
  std::size_t k = b.positions().size();
  for (std::size_t i = 0; i < k; ++i) {
    const Letter& l = b.letters()[i];
    const Matrix<Rat>& block = i + 1 == k ? jordan : ident;
    long long src = base[i];
    long long dst = base[(i + 1) % k];
    Matrix<Rat>& m = mats.at(l.arrow);
    for (long long r = 0; r < mult; ++r)
      for (long long c = 0; c < mult; ++c) {
        const Rat& x = block.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        if (is_zero(x)) continue;
        if (!l.inverse)
          m.at(static_cast<std::size_t>(dst + r), static_cast<std::size_t>(src + c)) = x;
        else
          m.at(static_cast<std::size_t>(src + r), static_cast<std::size_t>(dst + c)) = x;
      }
  }
  return Representation<Rat>(b.algebra(), d, mats, ctx);
}

/// Classification of an indecomposable representation.
struct Identification {
  enum class Kind { Simple, String, Band, Unidentified };
  Kind kind = Kind::Unidentified;
  std::string vertex;             // Simple
  std::optional<StringWord> word;  // String
  std::optional<BandWord> band;    // Band
  Rat lambda = Rat(0);
  long long mult = 1;
  std::string note;
};

inline std::string identification_to_string(const Identification& id) {
  std::ostringstream os;
  switch (id.kind) {
    case Identification::Kind::Simple:
      os << "simple at " << id.vertex;
      break;
    case Identification::Kind::String:
      os << "string " << word_to_string(id.word->letters());
      break;
    case Identification::Kind::Band:
      os << "band " << word_to_string(id.band->letters()) << " (lambda=" << rat_to_string(id.lambda)
         << ", mult " << id.mult << ")";
      break;
    case Identification::Kind::Unidentified:
      os << "unidentified (" << id.note << ")";
      break;
  }
  return os.str();
}

namespace detail {

inline void add_candidate(std::set<Rat>& out, const Rat& c) {
  if (is_zero(c)) return;
  out.insert(c);
  out.insert(Rat(1) / c);
}

inline void rational_roots_into(const Poly<Rat>& p, std::set<Rat>& out) {
  if (p.is_zero_poly() || p.degree() < 1) return;
  Rat inv = Rat(1) / p.lead();
  Poly<Rat> m = inv * p;
  for (const RatFactor& f : factor_rational_poly(m))
    if (f.factor.degree() == 1) add_candidate(out, -f.factor.coeff(0));
}

/// Walk composite when every letter acts invertibly on the full vertex
/// spaces. Rational eigenvalues of the result are parameter candidates.
inline void composite_candidates(const Representation<Rat>& n, const BandWord& b,
                                 std::set<Rat>& out) {
  const Quiver& q = n.quiver();
  std::string at = b.positions()[0];
  std::size_t dim0 = static_cast<std::size_t>(n.dim_at(at));
  if (dim0 == 0) return;
  Matrix<Rat> t = Matrix<Rat>::identity(dim0, n.ctx());
  for (const Letter& l : b.letters()) {
    const Matrix<Rat>& m = n.mat(l.arrow);
    if (!l.inverse) {
      t = m * t;
    } else {
      if (m.rows() != m.cols()) return;
      try {
        t = inverse(m) * t;
      } catch (const std::invalid_argument&) {
        return;
      }
    }
  }
  if (t.rows() != t.cols()) return;
  rational_roots_into(char_poly(t), out);
  (void)q;
}

/// Candidates from pencils of parallel arrows: parameters where one matrix
/// minus x times the other drops rank, read off entrywise and from the
/// interpolated determinant.
inline void pencil_candidates(const Representation<Rat>& n, std::set<Rat>& out) {
  const Quiver& q = n.quiver();
  const std::vector<Arrow>& arrows = q.arrows();
  for (std::size_t i = 0; i < arrows.size(); ++i)
    for (std::size_t j = 0; j < arrows.size(); ++j) {
      if (i == j) continue;
      const Arrow& u = arrows[i];
      const Arrow& w = arrows[j];
      if (u.tail != w.tail || u.head != w.head) continue;
      const Matrix<Rat>& a = n.mat(u.id);
      const Matrix<Rat>& bm = n.mat(w.id);
      for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c)
          if (!is_zero(a.at(r, c))) add_candidate(out, bm.at(r, c) / a.at(r, c));
      if (a.rows() != a.cols() || a.rows() == 0) continue;
      // det(B - xA) by evaluation at rows+1 points, then interpolation.
      std::size_t npts = a.rows() + 1;
      std::vector<Rat> xs, ys;
      for (std::size_t t = 0; t < npts; ++t) {
        Rat x = make_rat(static_cast<std::int64_t>(t));
        Matrix<Rat> pencil = bm;
        for (std::size_t r = 0; r < a.rows(); ++r)
          for (std::size_t c = 0; c < a.cols(); ++c)
            pencil.at(r, c) = pencil.at(r, c) - x * a.at(r, c);
        xs.push_back(x);
        ys.push_back(det(pencil));
      }
      Poly<Rat> p(n.ctx());
      for (std::size_t t = 0; t < npts; ++t) {
        Poly<Rat> term({ys[t]}, n.ctx());
        for (std::size_t s = 0; s < npts; ++s) {
          if (s == t) continue;
          Rat scale = Rat(1) / (xs[t] - xs[s]);
          term = term * Poly<Rat>({-xs[s] * scale, scale}, n.ctx());
        }
        p = p + term;
      }
      rational_roots_into(p, out);
    }
}

}  // namespace detail

/// Matches an indecomposable representation against the string and band
/// modules with its dimension vector. Band parameters are recovered
/// heuristically and always confirmed by an isomorphism test, so a wrong
/// guess can only lead to "unidentified", never to a wrong answer.
inline Identification identify(const Representation<Rat>& n,
                               std::shared_ptr<const BoundQuiver> algebra,
                               std::uint64_t seed = kDefaultSeed) {
  if (!(*n.algebra() == *algebra))
    throw std::invalid_argument("identify: representation is over a different algebra");
  Identification id;
  long long total = n.total_dim();
  if (total == 0) {
    id.note = "the zero representation is not indecomposable";
    return id;
  }

  for (const StringWord& w : enumerate_strings(algebra, total)) {
    if (w.dim_vector() != n.dim()) continue;
    if (!is_isomorphic(n, string_module(w), 8, seed)) continue;
    if (w.length() == 0) {
      id.kind = Identification::Kind::Simple;
      id.vertex = w.positions()[0];
    } else {
      id.kind = Identification::Kind::String;
      id.word = w;
    }
    return id;
  }

  for (const BandWord& b : enumerate_bands(algebra, total)) {
    if (total % b.length() != 0) continue;
    long long mult = total / b.length();
    if (b.dim_vector(mult) != n.dim()) continue;
    std::set<Rat> candidates;
    detail::composite_candidates(n, b, candidates);
    detail::pencil_candidates(n, candidates);
    for (std::int64_t small : {1, -1, 2, -2, 3, -3})
      candidates.insert(make_rat(small));
    candidates.insert(make_rat(1, 2));
    candidates.insert(make_rat(-1, 2));
    candidates.insert(make_rat(1, 3));
    candidates.insert(make_rat(-1, 3));
    for (const Rat& lambda : candidates) {
      if (is_zero(lambda)) continue;
      if (is_isomorphic(n, band_module(b, lambda, mult), 8, seed)) {
        id.kind = Identification::Kind::Band;
        id.band = b;
        id.lambda = lambda;
        id.mult = mult;
        return id;
      }
    }
  }

  id.note = "no string or band candidate of dimension vector matched";
  return id;
}

}  // namespace biserial
