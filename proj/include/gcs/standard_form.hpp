#pragma once

// Reduction of <psi| O |psi> on a generalized state U(g1) V(M) U(g2) |mu> to
// standard terms coeff * <mu| U(g) O_{j1} ... O_{jn} |mu>, and their evaluation.
//
// Commutation rules used, with w the weight vector of a basis operator O:
//   O V(M)        = V(M) e^{-i w.M.w / 2} U(e^{(M w).H}) O
//   O U(e^{c.H})  = U(e^{c.H}) e^{-i w.c} O
//   O_j U(g)      = U(g) sum_m ad(j,m) O_m          (ad = family ad_mix)
// so a monomial emits a per-term phase, one Cartan element exp(c.H) with
// c = M * (sum of weights), and Ad mixing from g1 and g2.  The bra-side
// unitaries cancel and the accumulated element becomes g2^{-1} exp(c.H) g2.

#include <unordered_map>
#include <vector>

#include "gcs/common.hpp"
#include "gcs/operator_expr.hpp"

namespace gcs {

struct ReferenceWeights {
  Vec mu;
};

template <class F>
struct GenState {
  typename F::Group g1, g2;
  Mat M;  // rank x rank, symmetric
  ReferenceWeights weights;
  Vec k1_coords, k2_coords;  // algebra coordinates when known (oracle input)
  bool has_coords = false;
};

template <class F>
GenState<F> make_state(const F& fam, const Vec& k1, const Vec& k2, const Mat& M_in) {
  require(M_in.rows() == fam.rank() && M_in.cols() == fam.rank(), ErrorKind::Input,
          "make_state: M must be rank x rank");
  require(M_in.allFinite() && k1.allFinite() && k2.allFinite(), ErrorKind::Input,
          "make_state: parameters must be finite");
  GenState<F> st;
  st.g1 = fam.group_from_coords(k1);
  st.g2 = fam.group_from_coords(k2);
  st.M = 0.5 * (M_in + M_in.transpose());
  st.weights.mu = fam.mu();
  st.k1_coords = k1;
  st.k2_coords = k2;
  st.has_coords = true;
  return st;
}

/// Expand a user-level observable into weight-basis monomials.
template <class F>
Expr expand(const F& fam, const OperatorExpr& obs) {
  Expr out;
  for (const auto& term : obs.terms) {
    Expr acc = {{term.coeff, {}}};
    for (const auto& op : term.ops) {
      Expr factor = fam.expand_op(op.name, op.index);
      Expr next;
      for (const auto& a : acc)
        for (const auto& f : factor) {
          WeightedMonomial m;
          m.coeff = a.coeff * f.coeff;
          m.ops = a.ops;
          m.ops.insert(m.ops.end(), f.ops.begin(), f.ops.end());
          next.push_back(std::move(m));
        }
      acc = std::move(next);
    }
    out.insert(out.end(), acc.begin(), acc.end());
  }
  return out;
}

/// Formal adjoint of a weight-basis expression (conjugate, reverse, dagger ops).
template <class F>
Expr conj_expr(const F& fam, const Expr& e) {
  Expr out;
  out.reserve(e.size());
  for (const auto& t : e) {
    WeightedMonomial m;
    m.coeff = std::conj(t.coeff);
    for (auto it = t.ops.rbegin(); it != t.ops.rend(); ++it) m.ops.push_back(fam.dagger_op(*it));
    out.push_back(std::move(m));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Faithful term-list pipeline
// ---------------------------------------------------------------------------

template <class F>
struct StandardTerm {
  cplx coeff;
  typename F::Group group;    // accumulated element in the defining rep
  std::vector<int> monomial;  // weight-basis operator indices
  Vec cartan;                 // set when group = g2^{-1} exp(cartan.H) g2
  bool has_cartan = false;
};

inline constexpr double kTermPrune = 1e-14;

/// Absorb a group element sitting to the right of the monomial:
/// U(G) mon U(g) = sum_j Ad-coeffs U(G g) mon_j.
template <class F>
std::vector<StandardTerm<F>> push_group(const F& fam, const StandardTerm<F>& term,
                                        const typename F::Group& g) {
  MatC ad = fam.ad_mix(g);
  std::vector<StandardTerm<F>> out;
  std::vector<std::pair<cplx, std::vector<int>>> acc = {{term.coeff, {}}};
  for (int j0 : term.monomial) {
    std::vector<std::pair<cplx, std::vector<int>>> next;
    for (const auto& [coeff, ops] : acc)
      for (int j = 0; j < fam.n_wops(); ++j) {
        cplx c = coeff * ad(j0, j);
        if (std::abs(c) < kTermPrune) continue;
        auto nops = ops;
        nops.push_back(j);
        next.emplace_back(c, std::move(nops));
      }
    acc = std::move(next);
  }
  for (auto& [coeff, ops] : acc) {
    StandardTerm<F> t;
    t.coeff = coeff;
    t.group = fam.mul(term.group, g);
    t.monomial = std::move(ops);
    out.push_back(std::move(t));
  }
  return out;
}

/// Commute V(M) from the right of the monomial to the left (where it is
/// understood to cancel against the bra-side V^dag): emits the scalar phase and
/// one Cartan element merged into the group factor.  All weight-basis operators
/// have definite weight, so each input term maps to exactly one output term.
template <class F>
StandardTerm<F> push_V(const F& fam, const StandardTerm<F>& term, const Mat& M) {
  int ell = fam.rank();
  Vec wsum = Vec::Zero(ell);
  cplx phase = 1.0;
  for (int j : term.monomial) {
    double wd = fam.wdir(j);
    if (wd != 0.0) {
      int mode = fam.mode_of(j);
      phase *= std::exp(-0.5 * I * (wd * wd * M(mode, mode)));
      phase *= std::exp(-I * (wd * wsum.dot(M.col(mode))));
      wsum(mode) += wd;
    }
  }
  StandardTerm<F> out = term;
  out.coeff *= phase;
  Vec c = M * wsum;
  out.group = fam.mul(term.group, fam.cartan_group(c));
  out.cartan = c;
  return out;
}

/// Full pipeline: convert to the weight basis, push U(g1), V(M), U(g2) leftward;
/// the bra-side unitaries cancel and each resulting term evaluates against
/// <mu| U(g2^{-1} e^{c.H} g2) O...O |mu>.
template <class F>
std::vector<StandardTerm<F>> reduce(const F& fam, const GenState<F>& state,
                                    const OperatorExpr& obs, int max_degree = 6) {
  require(obs.max_degree() <= max_degree, ErrorKind::Input,
          "reduce: observable degree exceeds the configured maximum");
  Expr wobs = expand(fam, obs);
  std::vector<StandardTerm<F>> out;
  typename F::Group id = fam.identity_group();
  MatC ad1 = fam.ad_mix(state.g1);
  MatC ad2 = fam.ad_mix(state.g2);
  typename F::Group g2inv = fam.inverse(state.g2);
  for (const auto& mono : wobs) {
    // push U(g1): mix every factor
    std::vector<std::pair<cplx, std::vector<int>>> acc = {{mono.coeff, {}}};
    for (int j0 : mono.ops) {
      std::vector<std::pair<cplx, std::vector<int>>> next;
      for (const auto& [coeff, ops] : acc)
        for (int j = 0; j < fam.n_wops(); ++j) {
          cplx c = coeff * ad1(j0, j);
          if (std::abs(c) < kTermPrune) continue;
          auto nops = ops;
          nops.push_back(j);
          next.emplace_back(c, std::move(nops));
        }
      acc = std::move(next);
    }
    for (auto& [coeff, ops] : acc) {
      StandardTerm<F> t;
      t.coeff = coeff;
      t.group = id;
      t.monomial = std::move(ops);
      // push V(M)
      t = push_V(fam, t, state.M);
      Vec c = t.cartan;
      // push U(g2) and conjugate the accumulated Cartan element
      StandardTerm<F> base;
      base.coeff = t.coeff;
      base.group = fam.mul(g2inv, fam.mul(fam.cartan_group(c), state.g2));
      base.monomial = t.monomial;
      std::vector<std::pair<cplx, std::vector<int>>> mixed = {{base.coeff, {}}};
      for (int j0 : base.monomial) {
        std::vector<std::pair<cplx, std::vector<int>>> next;
        for (const auto& [coeff2, ops2] : mixed)
          for (int j = 0; j < fam.n_wops(); ++j) {
            cplx cc = coeff2 * ad2(j0, j);
            if (std::abs(cc) < kTermPrune) continue;
            auto nops = ops2;
            nops.push_back(j);
            next.emplace_back(cc, std::move(nops));
          }
        mixed = std::move(next);
      }
      for (auto& [coeff2, ops2] : mixed) {
        StandardTerm<F> res;
        res.coeff = coeff2;
        res.group = base.group;
        res.monomial = std::move(ops2);
        res.cartan = c;
        res.has_cartan = true;
        if (std::abs(res.coeff) >= kTermPrune) out.push_back(std::move(res));
      }
    }
  }
  return out;
}

/// Evaluate <mu| U(term.group) O...O |mu> via the family's Gauss split and R
/// pushthrough.  Pipeline terms (has_cartan) use the exact conjugated-Cartan
/// amplitude through the state context; generic terms use the principal-branch
/// matrix route inside the family.
template <class F>
cplx evaluate_standard_term(const F& fam, const typename F::StateCtx& ctx,
                            const StandardTerm<F>& term) {
  require(term.has_cartan, ErrorKind::Input,
          "evaluate_standard_term: term lacks the factored group data");
  auto td = fam.term_data(ctx, term.cartan);
  std::vector<VecC> rows;
  rows.reserve(term.monomial.size());
  for (int j : term.monomial) {
    VecC e = VecC::Zero(fam.n_wops());
    e(j) = 1.0;
    rows.push_back(std::move(e));
  }
  return term.coeff * fam.eval_term(td, rows);
}

// ---------------------------------------------------------------------------
// Fast evaluator (depth-first expansion with per-weight caching)
// ---------------------------------------------------------------------------

template <class F>
class Evaluator {
 public:
  Evaluator(const F& fam, const GenState<F>& state, int max_degree = 6)
      : fam_(fam),
        state_(state),
        max_degree_(max_degree),
        ad1_(fam.ad_mix(state.g1)),
        ad2_(fam.ad_mix(state.g2)),
        ctx_(fam.make_ctx(state.g2)) {}

  const F& family() const { return fam_; }
  const GenState<F>& state() const { return state_; }
  const typename F::StateCtx& ctx() const { return ctx_; }

  cplx expect(const OperatorExpr& obs) {
    require(obs.max_degree() <= max_degree_, ErrorKind::Input,
            "expect: observable degree exceeds the configured maximum");
    cplx total = 0.0;
    for (const auto& term : obs.terms) total += term.coeff * user_monomial_value(term.ops);
    return total;
  }

  cplx expect_expr(const Expr& wobs) {
    cplx total = 0.0;
    for (const auto& mono : wobs) {
      std::vector<VecC> rows;
      rows.reserve(mono.ops.size());
      for (int j0 : mono.ops) rows.push_back(ad1_.row(j0).transpose());
      total += mono.coeff * monomial_value(rows);
    }
    return total;
  }

  /// <mu| B3^ U2^ B2^ V^ B1^ U1^ [O] U1 A1 V A2 U2 A3 |mu> with ^ = dagger.
  /// The B arguments are given in ket form (the insertion itself) and
  /// conjugated here.  Every expr is in the weight basis.
  cplx sandwich(const Expr& B3, const Expr& B2, const Expr& B1, const Expr& O, const Expr& A1,
                const Expr& A2, const Expr& A3) {
    Expr b3 = conj_expr(fam_, B3), b2 = conj_expr(fam_, B2), b1 = conj_expr(fam_, B1);
    cplx total = 0.0;
    for (const auto& t3 : b3)
      for (const auto& t2 : b2)
        for (const auto& t1 : b1)
          for (const auto& to : O)
            for (const auto& ta1 : A1)
              for (const auto& ta2 : A2)
                for (const auto& ta3 : A3) {
                  cplx pref = t3.coeff * t2.coeff * t1.coeff * to.coeff * ta1.coeff * ta2.coeff *
                              ta3.coeff;
                  if (std::abs(pref) < kTermPrune) continue;
                  total += pref * sandwich_monomials(t3.ops, t2.ops, t1.ops, to.ops, ta1.ops,
                                                     ta2.ops, ta3.ops);
                }
    return total;
  }

 private:
  struct CacheEntry {
    typename F::TermData td;
    bool has_adgc = false;
    MatC adgc;  // Ad mixing of the merged group element, for bra-side A3-slot ops
  };

  CacheEntry& entry_for(const int* wsum) {
    std::uint64_t key = 0;
    for (int k = 0; k < fam_.rank(); ++k) {
      int v = wsum[k] + 32;
      require(v >= 0 && v < 64, ErrorKind::Input, "weight sum out of cacheable range");
      key = key * 64 + std::uint64_t(v);
    }
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    Vec w(fam_.rank());
    for (int k = 0; k < fam_.rank(); ++k) w(k) = wsum[k];
    CacheEntry e;
    e.td = fam_.term_data(ctx_, (state_.M * w).eval());
    fam_.fold_mixer(e.td, ad2_);
    auto [pos, _] = cache_.emplace(key, std::move(e));
    return pos->second;
  }

  /// One user-level monomial: each named operator contributes either a linear
  /// combination of single weight ops (one slot, folded with the U(g1) mixing
  /// to avoid a 2^degree pre-expansion) or, for composite names like n[k], a
  /// short run of singleton slots.
  cplx user_monomial_value(const std::vector<OpRef>& ops) {
    std::vector<VecC> rows;
    cplx prefactor = 1.0;
    for (const auto& op : ops) {
      Expr e = fam_.expand_op(op.name, op.index);
      bool all_single = true;
      for (const auto& m : e) all_single &= (m.ops.size() == 1);
      if (all_single) {
        VecC row = VecC::Zero(fam_.n_wops());
        for (const auto& m : e) row += m.coeff * ad1_.row(m.ops[0]).transpose();
        rows.push_back(std::move(row));
      } else {
        require(e.size() == 1, ErrorKind::Input,
                "operator '" + op.name + "' has an unsupported expansion");
        prefactor *= e[0].coeff;
        for (int j0 : e[0].ops) rows.push_back(ad1_.row(j0).transpose());
      }
    }
    return prefactor * monomial_value(rows);
  }

  /// <psi| X_1 .. X_n |psi> with per-slot operators X_p = sum_j rows[p](j) O_j
  /// already mixed through U(g1).  The depth-first expansion keeps per-depth
  /// weight sums in preallocated scratch and exponentiates the accumulated
  /// phase once per leaf.
  cplx monomial_value(const std::vector<VecC>& rows) {
    int n = int(rows.size());
    int ell = fam_.rank();
    js_.resize(n);
    wsum_scratch_.assign(size_t(n + 1) * ell, 0);
    mw_scratch_.assign(size_t(n + 1) * ell, 0.0);
    return dfs(rows, 0, cplx(1.0), 0.0);
  }

  cplx dfs(const std::vector<VecC>& rows, int p, cplx coeff, double arg) {
    int ell = fam_.rank();
    const int* wsum = &wsum_scratch_[size_t(p) * ell];
    if (p == int(rows.size())) {
      CacheEntry& e = entry_for(wsum);
      return coeff * std::polar(1.0, -arg) * fam_.eval_indices(e.td, js_);
    }
    const double* mw = &mw_scratch_[size_t(p) * ell];
    int* wsum_next = &wsum_scratch_[size_t(p + 1) * ell];
    double* mw_next = &mw_scratch_[size_t(p + 1) * ell];
    cplx total = 0.0;
    const VecC& row = rows[p];
    for (int j = 0; j < fam_.n_wops(); ++j) {
      cplx a = row(j);
      if (std::abs(a.real()) + std::abs(a.imag()) < kTermPrune) continue;
      double wd = fam_.wdir(j);
      double darg = 0.0;
      for (int k = 0; k < ell; ++k) {
        wsum_next[k] = wsum[k];
        mw_next[k] = mw[k];
      }
      if (wd != 0.0) {
        int mode = fam_.mode_of(j);
        darg = 0.5 * wd * wd * state_.M(mode, mode) + wd * mw[mode];
        wsum_next[mode] += int(wd);
        for (int k = 0; k < ell; ++k) mw_next[k] += wd * state_.M(k, mode);
      }
      js_[p] = j;
      total += dfs(rows, p + 1, coeff * a, arg + darg);
    }
    return total;
  }

  /// General slotted monomial; O-slot operators branch over ad1.
  cplx sandwich_monomials(const std::vector<int>& b3, const std::vector<int>& b2,
                          const std::vector<int>& b1, const std::vector<int>& o,
                          const std::vector<int>& a1, const std::vector<int>& a2,
                          const std::vector<int>& a3) {
    // enumerate the ad1 mixing of the O segment
    cplx total = 0.0;
    std::vector<int> omix(o.size());
    enumerate_o(b3, b2, b1, o, a1, a2, a3, 0, cplx(1.0), omix, total);
    return total;
  }

  void enumerate_o(const std::vector<int>& b3, const std::vector<int>& b2,
                   const std::vector<int>& b1, const std::vector<int>& o,
                   const std::vector<int>& a1, const std::vector<int>& a2,
                   const std::vector<int>& a3, size_t p, cplx coeff, std::vector<int>& omix,
                   cplx& total) {
    if (p == o.size()) {
      total += coeff * sandwich_leaf(b3, b2, b1, omix, a1, a2, a3);
      return;
    }
    for (int j = 0; j < fam_.n_wops(); ++j) {
      cplx a = ad1_(o[p], j);
      if (std::abs(a) < kTermPrune) continue;
      omix[p] = j;
      enumerate_o(b3, b2, b1, o, a1, a2, a3, p + 1, coeff * a, omix, total);
    }
  }

  cplx sandwich_leaf(const std::vector<int>& b3, const std::vector<int>& b2,
                     const std::vector<int>& b1, const std::vector<int>& o,
                     const std::vector<int>& a1, const std::vector<int>& a2,
                     const std::vector<int>& a3) {
    int ell = fam_.rank();
    // V segment: b1 ++ o ++ a1 in order
    Eigen::VectorXi wsum = Eigen::VectorXi::Zero(ell);
    Vec mw = Vec::Zero(ell);
    cplx phase = 1.0;
    auto cross = [&](int j) {
      double wd = fam_.wdir(j);
      if (wd == 0.0) return;
      int mode = fam_.mode_of(j);
      phase *= std::exp(-I * (0.5 * wd * wd * state_.M(mode, mode) + wd * mw(mode)));
      wsum(mode) += int(wd);
      mw += wd * state_.M.col(mode);
    };
    for (int j : b1) cross(j);
    for (int j : o) cross(j);
    for (int j : a1) cross(j);
    Vec c = state_.M * wsum.cast<double>();
    // emitted Cartan element passes the b2 block picking up e^{-i w.c} each
    for (int j : b2) {
      double wd = fam_.wdir(j);
      if (wd != 0.0) phase *= std::exp(-I * wd * c(fam_.mode_of(j)));
    }
    CacheEntry& e = entry_for(wsum.data());
    if (!b3.empty() && !e.has_adgc) {
      e.adgc = fam_.ad_mix(merged_group(c));
      e.has_adgc = true;
    }
    std::vector<VecC> rows;
    rows.reserve(b3.size() + b2.size() + b1.size() + o.size() + a1.size() + a2.size() + a3.size());
    for (int j : b3) rows.push_back(e.adgc.row(j).transpose());
    for (int j : b2) rows.push_back(ad2_.row(j).transpose());
    for (int j : b1) rows.push_back(ad2_.row(j).transpose());
    for (int j : o) rows.push_back(ad2_.row(j).transpose());
    for (int j : a1) rows.push_back(ad2_.row(j).transpose());
    for (int j : a2) rows.push_back(ad2_.row(j).transpose());
    for (int j : a3) {
      VecC unit = VecC::Zero(fam_.n_wops());
      unit(j) = 1.0;
      rows.push_back(std::move(unit));
    }
    return phase * fam_.eval_term(e.td, rows);
  }

  typename F::Group merged_group(const Vec& c) const {
    return fam_.mul(fam_.inverse(state_.g2), fam_.mul(fam_.cartan_group(c), state_.g2));
  }

  const F& fam_;
  GenState<F> state_;
  int max_degree_;
  MatC ad1_, ad2_;
  typename F::StateCtx ctx_;
  std::vector<int> js_;
  std::vector<int> wsum_scratch_;
  std::vector<double> mw_scratch_;
  std::unordered_map<std::uint64_t, CacheEntry> cache_;
};

}  // namespace gcs
