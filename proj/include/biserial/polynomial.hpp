#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"

namespace biserial {

/// Dense univariate polynomial, coefficients low to high; empty = 0.
template <class K>
struct Poly {
  std::vector<K> c;
  FieldCtx<K> ctx;

  Poly() = default;
  explicit Poly(FieldCtx<K> f) : ctx(f) {}
  Poly(std::vector<K> coeffs, FieldCtx<K> f) : c(std::move(coeffs)), ctx(f) { trim(); }

  void trim() {
    while (!c.empty() && is_zero(c.back())) c.pop_back();
  }
  int degree() const { return static_cast<int>(c.size()) - 1; }
  bool is_zero_poly() const { return c.empty(); }
  K lead() const { return c.back(); }
  K coeff(std::size_t i) const { return i < c.size() ? c[i] : ctx.zero(); }

  static Poly constant(const K& v, FieldCtx<K> f) {
    Poly p(f);
    if (!biserial::is_zero(v)) p.c = {v};
    return p;
  }
  static Poly x(FieldCtx<K> f) { return Poly({f.zero(), f.one()}, f); }

  K eval(const K& t) const {
    K acc = ctx.zero();
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
    return acc;
  }

  friend bool operator==(const Poly& a, const Poly& b) {
    if (a.c.size() != b.c.size()) return false;
    for (std::size_t i = 0; i < a.c.size(); ++i)
      if (!(a.c[i] == b.c[i])) return false;
    return true;
  }
};

template <class K>
Poly<K> operator+(const Poly<K>& a, const Poly<K>& b) {
  Poly<K> r(a.ctx);
  r.c.resize(std::max(a.c.size(), b.c.size()), a.ctx.zero());
  for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = a.coeff(i) + b.coeff(i);
  r.trim();
  return r;
}

template <class K>
Poly<K> operator-(const Poly<K>& a, const Poly<K>& b) {
  Poly<K> r(a.ctx);
  r.c.resize(std::max(a.c.size(), b.c.size()), a.ctx.zero());
  for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = a.coeff(i) - b.coeff(i);
  r.trim();
  return r;
}

template <class K>
Poly<K> operator*(const Poly<K>& a, const Poly<K>& b) {
  if (a.is_zero_poly() || b.is_zero_poly()) return Poly<K>(a.ctx);
  Poly<K> r(a.ctx);
  r.c.assign(a.c.size() + b.c.size() - 1, a.ctx.zero());
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    if (is_zero(a.c[i])) continue;
    for (std::size_t j = 0; j < b.c.size(); ++j) r.c[i + j] = r.c[i + j] + a.c[i] * b.c[j];
  }
  r.trim();
  return r;
}

template <class K>
Poly<K> operator*(const K& s, const Poly<K>& a) {
  Poly<K> r = a;
  for (K& x : r.c) x = s * x;
  r.trim();
  return r;
}

/// Euclidean division; divisor must be nonzero.
template <class K>
std::pair<Poly<K>, Poly<K>> divmod(const Poly<K>& a, const Poly<K>& b) {
  if (b.is_zero_poly()) throw std::domain_error("polynomial division by zero");
  Poly<K> q(a.ctx), r = a;
  if (r.degree() >= b.degree())
    q.c.assign(static_cast<std::size_t>(r.degree() - b.degree()) + 1, a.ctx.zero());
  K inv = a.ctx.one() / b.lead();
  while (!r.is_zero_poly() && r.degree() >= b.degree()) {
    std::size_t shift = static_cast<std::size_t>(r.degree() - b.degree());
    K f = r.lead() * inv;
    q.c[shift] = f;
    for (std::size_t i = 0; i < b.c.size(); ++i)
      r.c[shift + i] = r.c[shift + i] - f * b.c[i];
    r.trim();
  }
  q.trim();
  return {q, r};
}

template <class K>
Poly<K> monic(const Poly<K>& a) {
  if (a.is_zero_poly()) return a;
  return (a.ctx.one() / a.lead()) * a;
}

template <class K>
Poly<K> gcd_monic(Poly<K> a, Poly<K> b) {
  while (!b.is_zero_poly()) {
    Poly<K> r = divmod(a, b).second;
    a = b;
    b = r;
  }
  if (a.is_zero_poly()) return a;
  return monic(a);
}

template <class K>
Poly<K> derivative(const Poly<K>& a) {
  Poly<K> d(a.ctx);
  for (std::size_t i = 1; i < a.c.size(); ++i) d.c.push_back(a.ctx.from_int(static_cast<std::int64_t>(i)) * a.c[i]);
  d.trim();
  return d;
}

/// base^exp mod m, exponent by repeated squaring; exp >= 0.
template <class K>
Poly<K> pow_mod(Poly<K> base, Int exp, const Poly<K>& m) {
  Poly<K> result = Poly<K>::constant(base.ctx.one(), base.ctx);
  base = divmod(base, m).second;
  while (exp > 0) {
    if ((exp & 1) != 0) result = divmod(result * base, m).second;
    base = divmod(base * base, m).second;
    exp >>= 1;
  }
  return result;
}

template <class K>
std::string poly_to_string(const Poly<K>& p, const std::string& var = "x") {
  if (p.is_zero_poly()) return "0";
  std::string s;
  for (int i = p.degree(); i >= 0; --i) {
    K c = p.coeff(static_cast<std::size_t>(i));
    if (is_zero(c)) continue;
    std::string cs = scalar_to_string(c);
    bool neg = !cs.empty() && cs[0] == '-';
    if (s.empty())
      s += neg ? "-" : "";
    else
      s += neg ? " - " : " + ";
    if (neg) cs = cs.substr(1);
    if (i == 0) {
      s += cs;
    } else {
      if (cs != "1") s += cs + "*";
      s += var;
      if (i > 1) s += "^" + std::to_string(i);
    }
  }
  return s;
}

/// Unique interpolating polynomial of degree < #points through distinct nodes.
inline Poly<Rat> lagrange_interpolate(const std::vector<std::pair<Rat, Rat>>& pts) {
  FieldCtx<Rat> ctx;
  Poly<Rat> acc(ctx);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Poly<Rat> term = Poly<Rat>::constant(Rat(1), ctx);
    Rat denom(1);
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j == i) continue;
      term = term * Poly<Rat>({Rat(0) - pts[j].first, Rat(1)}, ctx);
      denom *= pts[i].first - pts[j].first;
    }
    acc = acc + (pts[i].second / denom) * term;
  }
  return acc;
}

/// Characteristic polynomial of a square matrix over Q (Faddeev-LeVerrier;
/// the integer divisions are exact in characteristic zero).
inline Poly<Rat> char_poly(const Matrix<Rat>& a) {
  if (!a.is_square()) throw std::invalid_argument("char_poly of non-square matrix");
  const std::size_t n = a.rows();
  FieldCtx<Rat> ctx;
  std::vector<Rat> coeffs(n + 1, Rat(0));
  coeffs[n] = Rat(1);
  Matrix<Rat> m = Matrix<Rat>::identity(n, ctx);
  for (std::size_t k = 1; k <= n; ++k) {
    Matrix<Rat> am = a * m;
    Rat tr(0);
    for (std::size_t i = 0; i < n; ++i) tr += am.at(i, i);
    Rat ck = Rat(0) - tr / Rat(static_cast<std::int64_t>(k));
    coeffs[n - k] = ck;
    m = am;
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) += ck;
  }
  return Poly<Rat>(coeffs, ctx);
}

/// p(A) by Horner on matrices.
inline Matrix<Rat> eval_at_matrix(const Poly<Rat>& p, const Matrix<Rat>& a) {
  const std::size_t n = a.rows();
  FieldCtx<Rat> ctx;
  Matrix<Rat> acc(n, n, ctx);
  for (auto it = p.c.rbegin(); it != p.c.rend(); ++it) {
    acc = acc * a;
    for (std::size_t i = 0; i < n; ++i) acc.at(i, i) += *it;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Exact factorization over Q, sized for characteristic polynomials of the
// matrices this library produces (degree <= ~12). Pipeline: Yun square-free
// split, rational roots by Hensel lifting + rational reconstruction, then
// mod-p irreducibility certificates with a bounded Kronecker search as the
// final fallback.
// ---------------------------------------------------------------------------

namespace polydetail {

inline Int int_content(const std::vector<Int>& c) {
  Int g = 0;
  for (const Int& x : c) g = boost::multiprecision::gcd(g, x);
  return g == 0 ? Int(1) : g;
}

/// Clears denominators and content; positive leading coefficient.
inline std::vector<Int> to_primitive_int(const Poly<Rat>& p) {
  Int l = 1;
  for (const Rat& x : p.c) l = boost::multiprecision::lcm(l, rat_den(x));
  std::vector<Int> c;
  c.reserve(p.c.size());
  for (const Rat& x : p.c) c.push_back(rat_num(x) * (l / rat_den(x)));
  Int g = int_content(c);
  if (!c.empty() && c.back() < 0) g = -g;
  for (Int& x : c) x /= g;
  return c;
}

inline Poly<Rat> int_to_rat_poly(const std::vector<Int>& c) {
  FieldCtx<Rat> ctx;
  std::vector<Rat> rc;
  rc.reserve(c.size());
  for (const Int& x : c) rc.emplace_back(x);
  return Poly<Rat>(rc, ctx);
}

inline Int int_poly_eval(const std::vector<Int>& c, const Int& t) {
  Int acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

inline Poly<Fp> reduce_mod_p(const std::vector<Int>& c, std::int64_t p) {
  FieldCtx<Fp> ctx(p);
  std::vector<Fp> fc;
  fc.reserve(c.size());
  for (const Int& x : c) fc.push_back(ctx.from_int(static_cast<std::int64_t>(x % p)));
  return Poly<Fp>(fc, ctx);
}

/// Rational reconstruction: the unique n/d with x = n/d mod m, |n| <= bound_n,
/// 0 < d <= bound_d, gcd(d, m) = 1, when one exists and 2*bound_n*bound_d < m.
inline std::optional<Rat> rational_reconstruct(Int x, const Int& m, const Int& bound_n,
                                               const Int& bound_d) {
  Int r0 = m, r1 = x % m;
  if (r1 < 0) r1 += m;
  Int t0 = 0, t1 = 1;
  while (r1 > bound_n) {
    Int q = r0 / r1;
    Int r2 = r0 - q * r1;
    Int t2 = t0 - q * t1;
    r0 = r1; r1 = r2;
    t0 = t1; t1 = t2;
  }
  Int n = r1, d = t1;
  if (d < 0) { n = -n; d = -d; }
  if (d == 0 || d > bound_d) return std::nullopt;
  if (boost::multiprecision::gcd(boost::multiprecision::abs(n), d) != 1) return std::nullopt;
  return Rat(n, d);
}

inline const std::vector<std::int64_t>& certificate_primes() {
  static const std::vector<std::int64_t> ps = {2,  3,  5,  7,  11, 13, 17, 19,
                                               23, 29, 31, 37, 41, 43};
  return ps;
}

/// True when f mod p is square-free and irreducible (distinct-degree sieve:
/// no irreducible factor of degree <= deg/2).
inline bool irreducible_mod_p(const std::vector<Int>& f, std::int64_t p) {
  if (f.back() % p == 0) return false;
  Poly<Fp> fp = reduce_mod_p(f, p);
  FieldCtx<Fp> ctx(p);
  if (fp.degree() != static_cast<int>(f.size()) - 1) return false;
  fp = monic(fp);
  Poly<Fp> d = derivative(fp);
  if (gcd_monic(fp, d).degree() != 0) return false;
  int deg = fp.degree();
  Poly<Fp> x = Poly<Fp>::x(ctx);
  Poly<Fp> h = x;
  for (int i = 1; i <= deg / 2; ++i) {
    h = pow_mod(h, Int(p), fp);
    if (gcd_monic(h - x, fp).degree() != 0) return false;
  }
  return true;
}

/// All roots of f mod p by direct evaluation (p stays small here).
inline std::vector<std::int64_t> roots_mod_p(const std::vector<Int>& f, std::int64_t p) {
  std::vector<std::int64_t> roots;
  FieldCtx<Fp> ctx(p);
  Poly<Fp> fp = reduce_mod_p(f, p);
  for (std::int64_t r = 0; r < p; ++r)
    if (fp.eval(ctx.from_int(r)).is_zero()) roots.push_back(r);
  return roots;
}

/// Rational roots of a square-free primitive integer polynomial. Each root
/// mod p is Hensel-lifted quadratically, then reconstructed; every candidate
/// is verified exactly before being accepted.
inline std::vector<Rat> rational_roots_squarefree(const std::vector<Int>& f) {
  std::vector<Rat> out;
  if (f.size() <= 1) return out;
  std::vector<Int> g = f;
  if (g[0] == 0) {
    out.emplace_back(0);
    while (g[0] == 0) g.erase(g.begin());
    if (g.size() <= 1) return out;
  }
  // pick a modest prime keeping g square-free, lead unit
  std::int64_t p = 0;
  for (std::int64_t cand : {10007, 10009, 10037, 10039, 10061, 10067, 10069, 10079,
                            10091, 10093, 10099, 10103, 10111, 10133}) {
    if (g.back() % cand == 0) continue;
    Poly<Fp> gp = reduce_mod_p(g, cand);
    if (gp.degree() != static_cast<int>(g.size()) - 1) continue;
    if (gcd_monic(gp, derivative(gp)).degree() == 0) {
      p = cand;
      break;
    }
  }
  if (p == 0) return out;  // wildly degenerate input; callers verify anyway

  Int bound_n = boost::multiprecision::abs(g[0]);
  Int bound_d = boost::multiprecision::abs(g.back());
  Int target = 2 * bound_n * bound_d + 1;

  Poly<Rat> grat = int_to_rat_poly(g);
  Poly<Rat> gder = derivative(grat);
  std::vector<Int> gder_i;
  for (std::size_t i = 1; i < g.size(); ++i) gder_i.push_back(Int(i) * g[i]);
  for (std::int64_t r0 : roots_mod_p(g, p)) {
    // quadratic Hensel: maintain root r and u ~ 1/g'(r) mod m
    Int m = p;
    Int r = r0;
    Int d0 = int_poly_eval(gder_i, r) % p;
    if (d0 < 0) d0 += p;
    if (d0 == 0) continue;  // cannot happen for a square-free reduction; guard only
    Int u = Fp(static_cast<std::int64_t>(d0), p).inverse().v;
    while (m < target) {
      m = m * m;
      Int fr = int_poly_eval(g, r) % m;
      r = (r - fr * u) % m;
      if (r < 0) r += m;
      Int dr = int_poly_eval(gder_i, r) % m;
      u = (u * (2 - dr * u)) % m;
      if (u < 0) u += m;
    }
    auto cand = rational_reconstruct(r, m, bound_n, bound_d);
    if (!cand) continue;
    if (grat.eval(*cand) == 0) out.push_back(*cand);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Factors nonzero integers by trial division; nullopt when a cofactor
/// survives past the small-prime bound and is not obviously prime.
inline std::optional<std::map<Int, int>> trial_factor(Int n) {
  std::map<Int, int> f;
  n = boost::multiprecision::abs(n);
  for (Int p = 2; p * p <= n && p < 100000; p += (p == 2 ? 1 : 2)) {
    while (n % p == 0) {
      ++f[p];
      n /= p;
    }
  }
  if (n > 1) {
    if (n < Int(100000) * Int(100000))
      ++f[n];  // cofactor below bound^2 with no small divisor is prime
    else
      return std::nullopt;
  }
  return f;
}

inline std::vector<Int> divisors_from(const std::map<Int, int>& f, std::size_t cap) {
  std::vector<Int> divs = {1};
  for (const auto& [p, e] : f) {
    std::vector<Int> next;
    Int pk = 1;
    for (int k = 0; k <= e; ++k) {
      for (const Int& d : divs) next.push_back(d * pk);
      pk *= p;
    }
    divs = std::move(next);
    if (divs.size() > cap) throw SplitInconclusive("factor search: divisor set too large");
  }
  return divs;
}

std::vector<Poly<Rat>> factor_squarefree(const Poly<Rat>& f);

/// Kronecker search for a factor of degree k of the square-free primitive
/// integer polynomial g (no rational roots). Exhaustive over interpolated
/// divisor tuples, so absence of a hit is a proof.
inline std::optional<Poly<Rat>> kronecker_find_factor(const std::vector<Int>& g, int k) {
  std::vector<Int> pts;
  for (int i = 0; pts.size() < static_cast<std::size_t>(k) + 1; ++i) {
    Int t = (i % 2 == 0) ? Int(i / 2) : Int(-(i / 2 + 1));
    pts.push_back(t);
  }
  std::vector<std::vector<Int>> divs;
  std::size_t combos = 1;
  for (const Int& t : pts) {
    Int v = int_poly_eval(g, t);
    auto fac = trial_factor(v);
    if (!fac) throw SplitInconclusive("factor search: value resists factorization");
    std::vector<Int> ds = divisors_from(*fac, 4096);
    std::vector<Int> signed_ds;
    for (const Int& d : ds) {
      signed_ds.push_back(d);
      signed_ds.push_back(-d);
    }
    divs.push_back(std::move(signed_ds));
    combos *= divs.back().size();
    if (combos > 4000000) throw SplitInconclusive("factor search: combination budget exceeded");
  }
  // fix the first divisor positive: factors come in +/- pairs
  std::vector<Int> first_pos;
  for (const Int& d : divs[0])
    if (d > 0) first_pos.push_back(d);
  divs[0] = first_pos;

  std::vector<std::size_t> idx(pts.size(), 0);
  Poly<Rat> grat = int_to_rat_poly(g);
  while (true) {
    std::vector<std::pair<Rat, Rat>> nodes;
    for (std::size_t i = 0; i < pts.size(); ++i)
      nodes.emplace_back(Rat(pts[i]), Rat(divs[i][idx[i]]));
    Poly<Rat> h = lagrange_interpolate(nodes);
    if (h.degree() == k) {
      bool integral = true;
      for (const Rat& c : h.c)
        if (rat_den(c) != 1) {
          integral = false;
          break;
        }
      if (integral) {
        auto [q, r] = divmod(grat, h);
        if (r.is_zero_poly()) return monic(h);
      }
    }
    // odometer
    std::size_t pos = 0;
    while (pos < idx.size()) {
      if (++idx[pos] < divs[pos].size()) break;
      idx[pos] = 0;
      ++pos;
    }
    if (pos == idx.size()) return std::nullopt;
  }
}

/// Irreducible factors of a square-free monic rational polynomial.
inline std::vector<Poly<Rat>> factor_squarefree(const Poly<Rat>& f) {
  std::vector<Poly<Rat>> out;
  if (f.degree() <= 0) return out;
  if (f.degree() == 1) {
    out.push_back(monic(f));
    return out;
  }
  Poly<Rat> rest = monic(f);
  FieldCtx<Rat> ctx;
  std::vector<Int> ints = to_primitive_int(rest);
  for (const Rat& r : rational_roots_squarefree(ints)) {
    out.push_back(Poly<Rat>({Rat(0) - r, Rat(1)}, ctx));
    rest = divmod(rest, out.back()).first;
  }
  if (rest.degree() <= 0) return out;
  if (rest.degree() <= 3) {  // no rational roots, degree <= 3: irreducible
    out.push_back(rest);
    return out;
  }
  std::vector<Int> gi = to_primitive_int(rest);
  for (std::int64_t p : certificate_primes()) {
    if (irreducible_mod_p(gi, p)) {
      out.push_back(rest);
      return out;
    }
  }
  // no modular certificate: exhaustive Kronecker split
  for (int k = 2; k <= rest.degree() / 2; ++k) {
    auto h = kronecker_find_factor(gi, k);
    if (h) {
      auto left = factor_squarefree(*h);
      auto right = factor_squarefree(divmod(rest, *h).first);
      out.insert(out.end(), left.begin(), left.end());
      out.insert(out.end(), right.begin(), right.end());
      return out;
    }
  }
  out.push_back(rest);  // proven irreducible: no factor of degree <= deg/2
  return out;
}

}  // namespace polydetail

struct RatFactor {
  Poly<Rat> factor;  // monic irreducible
  int multiplicity;
};

/// Irreducible factorization over Q of a monic polynomial, deterministic order
/// (degree, then coefficient string).
inline std::vector<RatFactor> factor_rational_poly(const Poly<Rat>& f) {
  if (f.is_zero_poly()) throw std::domain_error("factoring the zero polynomial");
  Poly<Rat> g = monic(f);
  std::vector<RatFactor> result;
  // Yun square-free decomposition: g = prod parts[i]^i
  Poly<Rat> gp = derivative(g);
  Poly<Rat> u = gcd_monic(g, gp);
  Poly<Rat> ci = divmod(g, u).first;
  Poly<Rat> di = divmod(gp, u).first - derivative(ci);
  int mult = 1;
  while (ci.degree() > 0) {
    Poly<Rat> ai = gcd_monic(ci, di);
    if (ai.degree() > 0)
      for (const Poly<Rat>& irr : polydetail::factor_squarefree(ai))
        result.push_back({irr, mult});
    Poly<Rat> cnext = divmod(ci, ai).first;
    di = divmod(di, ai).first - derivative(cnext);
    ci = cnext;
    ++mult;
  }
  std::sort(result.begin(), result.end(), [](const RatFactor& a, const RatFactor& b) {
    if (a.factor.degree() != b.factor.degree()) return a.factor.degree() < b.factor.degree();
    return poly_to_string(a.factor) < poly_to_string(b.factor);
  });
  return result;
}

/// Rational roots of an arbitrary nonzero rational polynomial.
inline std::vector<Rat> rational_roots(const Poly<Rat>& f) {
  if (f.is_zero_poly() || f.degree() == 0) return {};
  Poly<Rat> g = monic(f);
  Poly<Rat> sf = divmod(g, gcd_monic(g, derivative(g))).first;  // square-free part
  return polydetail::rational_roots_squarefree(polydetail::to_primitive_int(sf));
}

struct EigenBlock {
  Poly<Rat> factor;  // monic irreducible over Q
  int multiplicity;
  std::vector<std::vector<Rat>> kernel;  // basis of ker factor(A)^multiplicity
};

/// Splits K^n into the generalized kernels of the irreducible factors of the
/// characteristic polynomial of A. Kernel dimensions always sum to n.
inline std::vector<EigenBlock> char_poly_factor_split(const Matrix<Rat>& a) {
  std::vector<EigenBlock> blocks;
  Poly<Rat> cp = char_poly(a);
  for (const RatFactor& rf : factor_rational_poly(cp)) {
    Matrix<Rat> b = eval_at_matrix(rf.factor, a);
    Matrix<Rat> pw = Matrix<Rat>::identity(a.rows(), FieldCtx<Rat>{});
    for (int e = 0; e < rf.multiplicity; ++e) pw = pw * b;
    blocks.push_back({rf.factor, rf.multiplicity, nullspace(pw)});
  }
  std::size_t total = 0;
  for (const EigenBlock& blk : blocks) total += blk.kernel.size();
  if (total != a.rows())
    throw SplitInconclusive("generalized kernels do not span; factorization incomplete");
  return blocks;
}

}  // namespace biserial
