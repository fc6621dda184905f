#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "json.hpp"

#include "biserial/errors.hpp"
#include "biserial/matrix.hpp"
#include "biserial/quiver.hpp"
#include "biserial/rational.hpp"
#include "biserial/representation.hpp"

namespace biserial {

/// Parses "n" or "n/d" with arbitrary-precision integer parts.
inline Rat rational_from_string(const std::string& s) {
  try {
    std::size_t slash = s.find('/');
    if (slash == std::string::npos) return Rat(Int(s));
    Int num(s.substr(0, slash));
    Int den(s.substr(slash + 1));
    if (den == 0) throw DomainError("rational with zero denominator: '" + s + "'");
    return Rat(num) / Rat(den);
  } catch (const std::runtime_error&) {
    throw DomainError("malformed rational '" + s + "'");
  }
}

inline nlohmann::json matrix_to_json(const Matrix<Rat>& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(rat_to_string(m.at(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Module payload: dimension vector, field tag, and row-major matrices with
/// rational entries as strings.
inline nlohmann::json rep_to_json(const Representation<Rat>& m) {
  nlohmann::json dims = nlohmann::json::object();
  for (const auto& [v, n] : m.dim()) dims[v] = n;
  nlohmann::json mats = nlohmann::json::object();
  for (const Arrow& a : m.quiver().arrows()) mats[a.id] = matrix_to_json(m.mat(a.id));
  return nlohmann::json{{"dim", std::move(dims)}, {"field", "Q"}, {"mats", std::move(mats)}};
}

inline Representation<Rat> rep_from_json(const nlohmann::json& j,
                                         std::shared_ptr<const BoundQuiver> algebra) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("mats"))
    throw DomainError("module payload needs 'dim' and 'mats' members");
  if (j.contains("field") && j.at("field").get<std::string>() != "Q")
    throw DomainError("only rational module payloads are supported");

  FieldCtx<Rat> ctx;
  DimVector d;
  for (const std::string& v : algebra->quiver().vertices()) {
    if (!j.at("dim").contains(v)) throw DomainError("module payload misses vertex '" + v + "'");
    long long n = j.at("dim").at(v).get<long long>();
    if (n < 0) throw DomainError("negative dimension at vertex '" + v + "'");
    d[v] = n;
  }

  std::map<std::string, Matrix<Rat>> mats;
  for (const Arrow& a : algebra->quiver().arrows()) {
    if (!j.at("mats").contains(a.id))
      throw DomainError("module payload misses arrow '" + a.id + "'");
    const nlohmann::json& rows = j.at("mats").at(a.id);
    auto want_rows = static_cast<std::size_t>(d.at(a.head));
    auto want_cols = static_cast<std::size_t>(d.at(a.tail));
    if (!rows.is_array() || rows.size() != want_rows)
      throw DomainError("matrix for arrow '" + a.id + "' has the wrong number of rows");
    Matrix<Rat> m(want_rows, want_cols, ctx);
    for (std::size_t i = 0; i < want_rows; ++i) {
      const nlohmann::json& row = rows.at(i);
      if (!row.is_array() || row.size() != want_cols)
        throw DomainError("matrix for arrow '" + a.id + "' has a row of the wrong length");
      for (std::size_t c = 0; c < want_cols; ++c)
        m.at(i, c) = rational_from_string(row.at(c).get<std::string>());
    }
    mats.emplace(a.id, std::move(m));
  }
  return Representation<Rat>(std::move(algebra), std::move(d), std::move(mats), ctx);
}

}  // namespace biserial
