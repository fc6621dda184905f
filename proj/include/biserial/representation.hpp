#pragma once

#include <json.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "quiver.hpp"

namespace biserial {

/// Per-arrow matrix rank, keyed by arrow id.
using RankSequence = std::map<std::string, long long>;

/// A module over the bound quiver algebra, given by one matrix per arrow.
/// M(a) has shape d(head) x d(tail) and acts on column vectors, so a path
/// [a_1, ..., a_k] in application order evaluates to M(a_k) * ... * M(a_1).
/// Construction checks shapes only; relation vanishing is a separate,
/// explicit step (check_relations) because several call sites build
/// intermediate tuples that are not yet known to satisfy the relations.
template <class K>
class Representation {
 public:
  Representation(std::shared_ptr<const BoundQuiver> algebra, DimVector d,
                 std::map<std::string, Matrix<K>> mats, FieldCtx<K> ctx)
      : algebra_(std::move(algebra)), d_(std::move(d)), mats_(std::move(mats)), ctx_(ctx) {
    if (!algebra_) throw std::invalid_argument("representation: null algebra");
    validate_dim_vector(algebra_->quiver(), d_);
    const auto& arrows = algebra_->quiver().arrows();
    if (mats_.size() != arrows.size())
      throw std::invalid_argument("representation: one matrix per arrow required");
    for (const Arrow& a : arrows) {
      auto it = mats_.find(a.id);
      if (it == mats_.end())
        throw std::invalid_argument("representation: missing matrix for arrow " + a.id);
      const Matrix<K>& m = it->second;
      const auto want_rows = static_cast<std::size_t>(d_.at(a.head));
      const auto want_cols = static_cast<std::size_t>(d_.at(a.tail));
      if (m.rows() != want_rows || m.cols() != want_cols)
        throw std::invalid_argument("representation: matrix for arrow " + a.id +
                                    " has the wrong shape");
    }
  }

  const std::shared_ptr<const BoundQuiver>& algebra() const { return algebra_; }
  const Quiver& quiver() const { return algebra_->quiver(); }
  const DimVector& dim() const { return d_; }
  long long dim_at(const std::string& v) const { return d_.at(v); }
  long long total_dim() const {
    long long t = 0;
    for (const auto& [v, n] : d_) t += n;
    return t;
  }
  const Matrix<K>& mat(const std::string& arrow_id) const { return mats_.at(arrow_id); }
  const std::map<std::string, Matrix<K>>& mats() const { return mats_; }
  const FieldCtx<K>& ctx() const { return ctx_; }

 private:
  std::shared_ptr<const BoundQuiver> algebra_;
  DimVector d_;
  std::map<std::string, Matrix<K>> mats_;
  FieldCtx<K> ctx_;
};

template <class K>
Representation<K> zero_representation(std::shared_ptr<const BoundQuiver> algebra,
                                      const DimVector& d, FieldCtx<K> ctx) {
  std::map<std::string, Matrix<K>> mats;
  for (const Arrow& a : algebra->quiver().arrows())
    mats.emplace(a.id, Matrix<K>(static_cast<std::size_t>(d.at(a.head)),
                                 static_cast<std::size_t>(d.at(a.tail)), ctx));
  return Representation<K>(std::move(algebra), d, std::move(mats), ctx);
}

/// M(a_k) * ... * M(a_1) for a path [a_1, ..., a_k] in application order.
template <class K>
Matrix<K> evaluate_path(const Representation<K>& rep, const Path& path) {
  if (path.arrows.empty()) throw std::invalid_argument("evaluate_path: empty path");
  Matrix<K> acc = rep.mat(path.arrows.front());
  for (std::size_t i = 1; i < path.arrows.size(); ++i) acc = rep.mat(path.arrows[i]) * acc;
  return acc;
}

struct RelationCheck {
  bool ok = true;
  std::string failing;  // rendering of the first relation that does not vanish
  explicit operator bool() const { return ok; }
};

/// Evaluates every relation of `bq` on `rep` exactly.
template <class K>
RelationCheck check_relations(const BoundQuiver& bq, const Representation<K>& rep) {
  for (const Relation& rel : bq.relations()) {
    const Path& first_path = rel.terms().front().path;
    const std::string src = path_source(bq.quiver(), first_path);
    const std::string tgt = path_target(bq.quiver(), first_path);
    Matrix<K> sum(static_cast<std::size_t>(rep.dim_at(tgt)),
                  static_cast<std::size_t>(rep.dim_at(src)), rep.ctx());
    for (const RelTerm& term : rel.terms()) {
      K coeff = rep.ctx().from_int(1);
      if constexpr (std::is_same_v<K, Rat>) {
        coeff = term.coeff;
      } else {
        coeff = rep.ctx().from_int(static_cast<std::int64_t>(rat_num(term.coeff)));
        K den = rep.ctx().from_int(static_cast<std::int64_t>(rat_den(term.coeff)));
        if (is_zero(den)) throw DomainError("check_relations: coefficient denominator vanishes");
        coeff = coeff / den;
      }
      sum = sum + coeff * evaluate_path(rep, term.path);
    }
    if (!sum.is_zero()) return RelationCheck{false, relation_to_string(rel)};
  }
  return RelationCheck{};
}

template <class K>
RelationCheck check_relations(const Representation<K>& rep) {
  return check_relations(*rep.algebra(), rep);
}

template <class K>
RankSequence rank_sequence_of(const Representation<K>& rep) {
  RankSequence r;
  for (const auto& [id, m] : rep.mats()) r[id] = static_cast<long long>(rank(m));
  return r;
}

template <class K>
Representation<K> direct_sum(const Representation<K>& a, const Representation<K>& b) {
  if (!(*a.algebra() == *b.algebra()))
    throw std::invalid_argument("direct_sum: representations of different algebras");
  DimVector d = a.dim();
  for (const auto& [v, n] : b.dim()) d[v] += n;
  std::map<std::string, Matrix<K>> mats;
  for (const auto& [id, m] : a.mats()) mats.emplace(id, direct_sum_matrix(m, b.mat(id)));
  return Representation<K>(a.algebra(), std::move(d), std::move(mats), a.ctx());
}

/// Base change: M'(a) = g_{head} * M(a) * g_{tail}^{-1} with g_v invertible.
template <class K>
Representation<K> conjugate(const Representation<K>& rep,
                            const std::map<std::string, Matrix<K>>& g) {
  std::map<std::string, Matrix<K>> ginv;
  for (const auto& [v, m] : g) ginv.emplace(v, inverse(m));
  std::map<std::string, Matrix<K>> mats;
  for (const Arrow& a : rep.quiver().arrows())
    mats.emplace(a.id, g.at(a.head) * rep.mat(a.id) * ginv.at(a.tail));
  return Representation<K>(rep.algebra(), rep.dim(), std::move(mats), rep.ctx());
}

inline Rat scalar_from_string(const std::string& s, FieldCtx<Rat>) { return rat_from_string(s); }

inline Fp scalar_from_string(const std::string& s, FieldCtx<Fp> ctx) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("scalar_from_string: bad integer '" + s + "'");
  }
  if (pos != s.size())
    throw std::invalid_argument("scalar_from_string: bad integer '" + s + "'");
  return ctx.from_int(v);
}

/// JSON schema: {"dim": {vertex: int}, "field": "Q" or "Fp", "mats": {arrow:
/// row-major nested arrays of scalar strings}}. The quiver itself is never
/// embedded; callers pair the payload with a quiver file.
template <class K>
nlohmann::ordered_json representation_to_json(const Representation<K>& rep) {
  nlohmann::ordered_json j;
  j["dim"] = nlohmann::ordered_json::object();
  for (const auto& [v, n] : rep.dim()) j["dim"][v] = n;
  j["field"] = rep.ctx().name();
  j["mats"] = nlohmann::ordered_json::object();
  for (const auto& [id, m] : rep.mats()) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (std::size_t j2 = 0; j2 < m.cols(); ++j2) row.push_back(scalar_to_string(m.at(i, j2)));
      rows.push_back(std::move(row));
    }
    j["mats"][id] = std::move(rows);
  }
  return j;
}

inline std::string json_field_tag(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("field") || !j.at("field").is_string())
    throw DomainError("representation payload: missing string member 'field'");
  return j.at("field").get<std::string>();
}

template <class K>
Representation<K> representation_from_json(const nlohmann::json& j,
                                           std::shared_ptr<const BoundQuiver> algebra,
                                           FieldCtx<K> ctx) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("mats"))
    throw DomainError("representation payload: members 'dim', 'field', 'mats' required");
  if (json_field_tag(j) != ctx.name())
    throw DomainError("representation payload: field tag '" + json_field_tag(j) +
                      "' does not match requested field " + ctx.name());
  DimVector d;
  for (const auto& [v, n] : j.at("dim").items()) {
    if (!n.is_number_integer() || n.template get<long long>() < 0)
      throw DomainError("representation payload: dim values must be non-negative integers");
    d[v] = n.template get<long long>();
  }
  std::map<std::string, Matrix<K>> mats;
  const auto& jm = j.at("mats");
  if (!jm.is_object()) throw DomainError("representation payload: 'mats' must be an object");
  for (const Arrow& a : algebra->quiver().arrows()) {
    if (!jm.contains(a.id))
      throw DomainError("representation payload: missing matrix for arrow " + a.id);
    const auto& rows = jm.at(a.id);
    const auto want_rows = static_cast<std::size_t>(d.count(a.head) ? d.at(a.head) : -1);
    const auto want_cols = static_cast<std::size_t>(d.count(a.tail) ? d.at(a.tail) : -1);
    if (!rows.is_array() || rows.size() != want_rows)
      throw DomainError("representation payload: matrix for arrow " + a.id +
                        " has the wrong number of rows");
    Matrix<K> m(want_rows, want_cols, ctx);
    for (std::size_t i = 0; i < want_rows; ++i) {
      const auto& row = rows.at(i);
      if (!row.is_array() || row.size() != want_cols)
        throw DomainError("representation payload: matrix for arrow " + a.id +
                          " has the wrong number of columns");
      for (std::size_t c = 0; c < want_cols; ++c) {
        if (!row.at(c).is_string())
          throw DomainError("representation payload: matrix entries must be strings");
        try {
          m.at(i, c) = scalar_from_string(row.at(c).template get<std::string>(), ctx);
        } catch (const std::exception& e) {
          throw DomainError(std::string("representation payload: ") + e.what());
        }
      }
    }
    mats.emplace(a.id, std::move(m));
  }
  try {
    return Representation<K>(std::move(algebra), std::move(d), std::move(mats), ctx);
  } catch (const std::invalid_argument& e) {
    throw DomainError(std::string("representation payload: ") + e.what());
  }
}

}  // namespace biserial
