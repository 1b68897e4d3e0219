#pragma once

// Observables as complex-weighted sums of ordered operator monomials, plus the
// text format used by configs and the CLI:  `coeff_re coeff_im : op[i] op[j] ...`

#include <sstream>
#include <string>
#include <vector>

#include "gcs/common.hpp"

namespace gcs {

/// One monomial over the (family-specific) weight-basis operators.
struct WeightedMonomial {
  cplx coeff;
  std::vector<int> ops;
};

/// Sum of weight-basis monomials; empty op list = identity.
using Expr = std::vector<WeightedMonomial>;

struct OpRef {
  std::string name;
  int index = 0;
};

struct OpTerm {
  cplx coeff;
  std::vector<OpRef> ops;
};

/// User-facing observable: sum of ordered monomials in named family operators.
struct OperatorExpr {
  std::vector<OpTerm> terms;

  OperatorExpr& add(cplx c, std::vector<OpRef> ops) {
    terms.push_back({c, std::move(ops)});
    return *this;
  }

  int max_degree() const {
    int d = 0;
    for (const auto& t : terms) d = std::max(d, int(t.ops.size()));
    return d;
  }
};

inline OpRef parse_op_ref(const std::string& tok) {
  auto lb = tok.find('[');
  auto rb = tok.find(']');
  require(lb != std::string::npos && rb == tok.size() - 1 && rb > lb + 1, ErrorKind::Parse,
          "operator token must look like name[index]: '" + tok + "'");
  OpRef ref;
  ref.name = tok.substr(0, lb);
  try {
    size_t used = 0;
    ref.index = std::stoi(tok.substr(lb + 1, rb - lb - 1), &used);
    require(used == rb - lb - 1, ErrorKind::Parse, "bad operator index in '" + tok + "'");
  } catch (const std::exception&) {
    fail(ErrorKind::Parse, "bad operator index in '" + tok + "'");
  }
  return ref;
}

/// Parse one line `coeff_re coeff_im : op op ...`; an empty op list is the identity.
inline OpTerm parse_op_term(const std::string& line) {
  auto colon = line.find(':');
  require(colon != std::string::npos, ErrorKind::Parse, "missing ':' in observable line: " + line);
  std::istringstream head(line.substr(0, colon));
  double re, im;
  require(bool(head >> re >> im), ErrorKind::Parse, "bad coefficient in observable line: " + line);
  std::string trailing;
  require(!(head >> trailing), ErrorKind::Parse, "extra tokens before ':' in line: " + line);
  OpTerm term;
  term.coeff = cplx(re, im);
  std::istringstream tail(line.substr(colon + 1));
  std::string tok;
  while (tail >> tok) term.ops.push_back(parse_op_ref(tok));
  return term;
}

inline OperatorExpr parse_operator_expr(const std::vector<std::string>& lines) {
  OperatorExpr expr;
  for (const auto& line : lines) {
    bool blank = true;
    for (char ch : line)
      if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
    if (blank) continue;
    expr.terms.push_back(parse_op_term(line));
  }
  return expr;
}

inline std::string format_op_term(const OpTerm& t) {
  std::ostringstream out;
  out << t.coeff.real() << ' ' << t.coeff.imag() << " :";
  for (const auto& op : t.ops) out << ' ' << op.name << '[' << op.index << ']';
  return out.str();
}

/// Name-level adjoint used by the Hermiticity check; every shipped family op is
/// either self-adjoint or paired here.
inline std::string dagger_name(const std::string& name) {
  if (name == "sp") return "sm";
  if (name == "sm") return "sp";
  if (name == "a") return "adag";
  if (name == "adag") return "a";
  if (name == "c") return "cdag";
  if (name == "cdag") return "c";
  return name;  // sx, sy, sz, q, p, n, gamma, gammabar, nf
}

inline bool is_odd_op(const std::string& name) {
  return name == "c" || name == "cdag" || name == "gamma" || name == "gammabar";
}

/// Stable index-sort of a monomial.  Operators on distinct indices commute
/// (anticommute when both are fermionic-odd); same-index blocks keep their
/// internal order, so this is an exact rewriting, not a simplification.
inline std::pair<std::string, double> canonical_key(const OpTerm& t) {
  std::vector<OpRef> ops = t.ops;
  double sign = 1.0;
  for (size_t i = 1; i < ops.size(); ++i)
    for (size_t j = i; j > 0 && ops[j - 1].index > ops[j].index; --j) {
      if (is_odd_op(ops[j - 1].name) && is_odd_op(ops[j].name)) sign = -sign;
      std::swap(ops[j - 1], ops[j]);
    }
  std::string k;
  for (const auto& op : ops) k += op.name + "[" + std::to_string(op.index) + "]";
  return {k, sign};
}

/// True when expr equals its formal adjoint after commuting distinct-index
/// operators into a canonical order.
inline bool is_hermitian(const OperatorExpr& expr) {
  std::vector<OpTerm> adj;
  for (const auto& t : expr.terms) {
    OpTerm a;
    a.coeff = std::conj(t.coeff);
    for (auto it = t.ops.rbegin(); it != t.ops.rend(); ++it)
      a.ops.push_back({dagger_name(it->name), it->index});
    adj.push_back(std::move(a));
  }
  auto accumulate = [&](const std::vector<OpTerm>& ts) {
    std::vector<std::pair<std::string, cplx>> acc;
    for (const auto& t : ts) {
      auto [k, sign] = canonical_key(t);
      cplx c = sign * t.coeff;
      bool found = false;
      for (auto& [ak, ac] : acc)
        if (ak == k) {
          ac += c;
          found = true;
        }
      if (!found) acc.emplace_back(k, c);
    }
    return acc;
  };
  auto a = accumulate(expr.terms), b = accumulate(adj);
  for (const auto& [k, c] : a) {
    cplx other = 0;
    for (const auto& [bk, bc] : b)
      if (bk == k) other = bc;
    if (std::abs(c - other) > 1e-12) return false;
  }
  for (const auto& [k, c] : b) {
    cplx other = 0;
    for (const auto& [ak, ac] : a)
      if (ak == k) other = ac;
    if (std::abs(c - other) > 1e-12) return false;
  }
  return true;
}

}  // namespace gcs
