#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "mahler/growth.hpp"
#include "mahler/operators.hpp"
#include "mahler/reduction.hpp"
#include "mahler/xi.hpp"

namespace mahler {

using Json = nlohmann::ordered_json;

// Version of every JSON document emitted by the library.
inline constexpr int kJsonFormat = 1;

// ---- text parsers (all throw Error(ParseError) on malformed input)
//
// Expressions are sums, differences and products of
//   integers, z, z^e (e an integer or a parenthesized rational),
//   root(<integer polynomial in x>; <root index>) for algebraic constants,
//   parenthesized subexpressions, O(z^N),
// and additionally
//   M (the Mahler operator Phi_p) in operator literals, written with the
//   trailing "@ p=N";
//   xi[alpha=(..); lambda=(..); a=(..)] or the compact xi[(..);(..);(..)]
//   in xi expressions.
// Products follow operator composition: M*z = z^p*M.

Alg parse_algebraic(const std::string& text);
XiIndex parse_xi_index(const std::string& text);
// p is needed only when the text multiplies two xi-terms.
XiExpr parse_xi_expr(const std::string& text, long p = 2);
// "[c=1, j=0] { ... } ; [c=-1/2, j=1] { ... }"; a bare xi expression means c=1, j=0.
GeneralizedSeries parse_generalized_series(const std::string& text, long p = 2);
// Operator literal; "@ p=N" may be omitted when default_p is given (> 0).
MahlerOperator parse_operator(const std::string& text, long default_p);

// ---- compact text: "z^-1 + xi[(0);(1);(1)]"
std::string to_compact_string(const XiIndex& w);
std::string to_compact_string(const XiExpr& x);
std::string to_compact_string(const GeneralizedSeries& g);

// Polynomial in z as text, e.g. "1 - 2*z + z^3".
std::string to_string_in_z(const AlgPoly& f);

// ---- JSON
Json to_json(const Rational& x);
Json to_json(const Alg& x);
Json to_json(const Puiseux& f);
Json to_json(const MahlerOperator& l);
Json to_json(const XiIndex& w);
Json to_json(const XiExpr& x);
Json to_json(const GeneralizedSeries& g);
Json to_json(const SeriesMatrix& m);
Json to_json(const XiMatrix& m);
Json to_json(const AlgMatrix& m);
Json to_json(const NewtonData& d);
Json to_json(const Factorization& f);
Json to_json(const ResidualReport& r);
Json to_json(const ReductionResult& r);
Json to_json(const GrowthClass& g);
Json to_json(const DenominatorReport& d);
Json to_json(const PurityReport& r);

Rational rational_from_json(const Json& j);
Alg alg_from_json(const Json& j);
Puiseux puiseux_from_json(const Json& j);
MahlerOperator operator_from_json(const Json& j);
XiIndex xi_index_from_json(const Json& j);
XiExpr xi_expr_from_json(const Json& j);
GeneralizedSeries generalized_series_from_json(const Json& j);

// {"format": 1, "kind": kind, ...payload fields}
Json json_document(const std::string& kind, Json payload);

}  // namespace mahler
