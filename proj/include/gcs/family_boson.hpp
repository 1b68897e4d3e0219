#pragma once

// Bosonic Gaussian family on N modes: Sp(2N,R) group data, Cartan decomposition
// S = u^{-1} T, analytic A+/A0/r0, R matrix, Wick moments, and the ladder-basis
// hooks used by the pushdown pipeline.
//
// Quadrature ordering x = (q_1..q_N, p_1..p_N); ladder ordering (a_1..a_N,
// adag_1..adag_N) with a = (q + i p)/sqrt(2).

#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "gcs/common.hpp"
#include "gcs/lie_core.hpp"
#include "gcs/operator_expr.hpp"

namespace gcs::boson {

inline Mat omega(int n_modes) {
  Mat om = Mat::Zero(2 * n_modes, 2 * n_modes);
  om.topRightCorner(n_modes, n_modes).setIdentity();
  om.bottomLeftCorner(n_modes, n_modes) = -Mat::Identity(n_modes, n_modes);
  return om;
}

inline double symplectic_defect(const Mat& S) {
  int n = int(S.rows()) / 2;
  return (S.transpose() * omega(n) * S - omega(n)).cwiseAbs().maxCoeff();
}

/// (a ; adag) = ladder_map * (q ; p).
inline MatC ladder_map(int n_modes) {
  int n = n_modes;
  MatC w = MatC::Zero(2 * n, 2 * n);
  double r = 1.0 / std::sqrt(2.0);
  w.topLeftCorner(n, n) = r * MatC::Identity(n, n);
  w.topRightCorner(n, n) = cplx(0, r) * MatC::Identity(n, n);
  w.bottomLeftCorner(n, n) = r * MatC::Identity(n, n);
  w.bottomRightCorner(n, n) = cplx(0, -r) * MatC::Identity(n, n);
  return w;
}

inline MatC ladder_map_inv(int n_modes) {
  int n = n_modes;
  MatC w = MatC::Zero(2 * n, 2 * n);
  double r = 1.0 / std::sqrt(2.0);
  w.topLeftCorner(n, n) = r * MatC::Identity(n, n);
  w.topRightCorner(n, n) = r * MatC::Identity(n, n);
  w.bottomLeftCorner(n, n) = cplx(0, -r) * MatC::Identity(n, n);
  w.bottomRightCorner(n, n) = cplx(0, r) * MatC::Identity(n, n);
  return w;
}

/// Principal matrix square root of a symmetric positive-definite matrix.
inline Mat spd_sqrt(const Mat& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  require(es.info() == Eigen::Success, ErrorKind::Input, std::string(what) + ": eigensolver failed");
  require(es.eigenvalues().minCoeff() > 0.0, ErrorKind::Input,
          std::string(what) + ": matrix is not positive definite");
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

/// Principal log of an orthogonal-symplectic u; eigenvalues lie on the unit
/// circle and a value at -1 makes the branch ambiguous (raised as an error,
/// never silently chosen).
inline MatC orthosymplectic_log(const Mat& u) {
  Eigen::ComplexEigenSolver<MatC> es(u.cast<cplx>());
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    require(std::abs(es.eigenvalues()(i) + 1.0) > 1e-10, ErrorKind::Branch,
            "matrix log of u: eigenvalue at -1, branch undefined");
  return u.cast<cplx>().log();
}

struct CartanFactors {
  Mat T;       // symmetric symplectic, Omega T = T^{-1} Omega
  Mat u;       // orthogonal symplectic
  double theta;
};

/// S = u^{-1} T with T = sqrt(S^T S), u = T S^{-1}, theta = (1/4) tr(Omega log u).
inline CartanFactors cartan_decompose(const Mat& S) {
  int n = int(S.rows()) / 2;
  require(symplectic_defect(S) < 1e-10, ErrorKind::Input, "cartan_decompose: S is not symplectic");
  CartanFactors cf;
  cf.T = spd_sqrt(S.transpose() * S, "cartan_decompose");
  cf.u = cf.T * S.inverse();
  cplx tr = (omega(n).cast<cplx>() * orthosymplectic_log(cf.u)).trace();
  require(std::abs(tr.imag()) < 1e-9, ErrorKind::Input, "cartan_decompose: non-real phase trace");
  cf.theta = 0.25 * tr.real();
  return cf;
}

struct GaussData {
  MatC A_plus;   // N x N complex symmetric
  MatC A_zero;   // N x N, (1/4) log(1 - 4 A+ A+^*)
  cplx r0;       // <0|U(S)|0>
};

/// A+ and A0 from the block identity 2 [[Re A+, Im A+],[Im A+, -Re A+]] =
/// (S^T S - 1)(S^T S + 1)^{-1}; no phase information needed or computed.
inline GaussData a_plus_blocks(const Mat& S) {
  int n = int(S.rows()) / 2;
  Mat sts = S.transpose() * S;
  Mat Y = (sts - Mat::Identity(2 * n, 2 * n)) *
          (sts + Mat::Identity(2 * n, 2 * n)).inverse();
  Mat re = Y.topLeftCorner(n, n) / 2.0, im = Y.topRightCorner(n, n) / 2.0;
  double defect = std::max((Y.bottomRightCorner(n, n) / 2.0 + re).cwiseAbs().maxCoeff(),
                           (Y.bottomLeftCorner(n, n) / 2.0 - im).cwiseAbs().maxCoeff());
  defect = std::max(defect, (re - re.transpose()).cwiseAbs().maxCoeff());
  require(defect < 1e-10, ErrorKind::Input,
          "a_plus_from_S: tanh block does not have the symplectic structure");
  GaussData g;
  g.A_plus = re.cast<cplx>() + I * im.cast<cplx>();
  MatC one = MatC::Identity(n, n);
  MatC m = one - 4.0 * g.A_plus * g.A_plus.conjugate();
  Eigen::SelfAdjointEigenSolver<MatC> es(m);
  require(es.eigenvalues().minCoeff() > 0.0, ErrorKind::Input,
          "a_plus_from_S: 1 - 4 A+ A+^* not positive definite");
  g.A_zero = 0.25 * (es.eigenvectors() *
                     es.eigenvalues().array().log().matrix().asDiagonal() *
                     es.eigenvectors().adjoint());
  g.r0 = std::exp(0.25 * es.eigenvalues().array().log().sum());  // |r0| only
  return g;
}

/// Full Gauss data including the phase of r0 = <0|U(S)|0> through the
/// principal-branch Cartan decomposition.
inline GaussData a_plus_from_S(const Mat& S) {
  GaussData g = a_plus_blocks(S);
  g.r0 = std::abs(g.r0) * std::exp(-I * cartan_decompose(S).theta);
  return g;
}

/// 2N x 2N pushthrough of the quadrature vector by T- = exp(-(A+^*) a a):
/// R = [[1 - A+^*, -i A+^*], [-i A+^*, 1 + A+^*]].
inline MatC r_matrix_boson(const MatC& A_plus) {
  int n = int(A_plus.rows());
  MatC ac = A_plus.conjugate();
  MatC R(2 * n, 2 * n);
  R.topLeftCorner(n, n) = MatC::Identity(n, n) - ac;
  R.topRightCorner(n, n) = -I * ac;
  R.bottomLeftCorner(n, n) = -I * ac;
  R.bottomRightCorner(n, n) = MatC::Identity(n, n) + ac;
  return R;
}

/// Allocation-free pairing recursion over Q(js[p], js[q]), positions in slot
/// order; `fermionic` applies the alternating contraction sign.
inline cplx pair_over(const MatC& Q, const int* js, const int* pos, int m, bool fermionic) {
  if (m == 0) return 1.0;
  cplx total = 0.0;
  double sign = 1.0;
  int rest[16];
  for (int j = 1; j < m; ++j) {
    int r = 0;
    for (int t = 1; t < m; ++t)
      if (t != j) rest[r++] = pos[t];
    total += sign * Q(js[pos[0]], js[pos[j]]) * pair_over(Q, js, rest, m - 2, fermionic);
    if (fermionic) sign = -sign;
  }
  return total;
}

/// Pairing sum over a two-point matrix P(p,q) defined for p < q (slot order).
inline cplx pair_sum(const MatC& P, std::vector<int>& idx) {
  size_t m = idx.size();
  if (m % 2 == 1) return 0.0;
  if (m == 0) return 1.0;
  cplx total = 0.0;
  int first = idx[0];
  for (size_t j = 1; j < m; ++j) {
    std::vector<int> rest;
    rest.reserve(m - 2);
    for (size_t t = 1; t < m; ++t)
      if (t != j) rest.push_back(idx[t]);
    total += P(first, idx[j]) * pair_sum(P, rest);
  }
  return total;
}

/// Vacuum moments of quadrature monomials: <0| x_{i1} ... x_{in} |0> with the
/// two-point function <0| x_i x_j |0> = (delta_ij + i Omega_ij)/2; odd degree is 0.
inline cplx wick_moments(const std::vector<int>& quadrature_idx, int n_modes) {
  MatC G = 0.5 * (MatC::Identity(2 * n_modes, 2 * n_modes) + I * omega(n_modes).cast<cplx>());
  MatC P(quadrature_idx.size(), quadrature_idx.size());
  for (size_t p = 0; p < quadrature_idx.size(); ++p)
    for (size_t q = 0; q < quadrature_idx.size(); ++q)
      P(p, q) = G(quadrature_idx[p], quadrature_idx[q]);
  std::vector<int> idx(quadrature_idx.size());
  for (size_t p = 0; p < idx.size(); ++p) idx[p] = int(p);
  return pair_sum(P, idx);
}

/// Pair matrix Z of the Gaussian state U(S)|0>:
/// U(S)|0> = <0|U(S)|0> exp(Z_{kl} adag_k adag_l)|0>, Z = -(1/2) alpha^{-1} beta
/// from the ladder-basis blocks of S^{-1}.
inline MatC pair_matrix(const Mat& S) {
  int n = int(S.rows()) / 2;
  MatC L = ladder_map(n) * S.inverse().cast<cplx>() * ladder_map_inv(n);
  MatC alpha = L.topLeftCorner(n, n), beta = L.topRightCorner(n, n);
  MatC Z = -0.5 * alpha.partialPivLu().solve(beta);
  require((Z - Z.transpose()).cwiseAbs().maxCoeff() < 1e-9, ErrorKind::Input,
          "pair_matrix: result not symmetric (S not symplectic?)");
  return Z;
}

/// log det (1 - X)^{-1/2} style factors via eigenvalues; each eigenvalue of X
/// stays inside the unit disk so the principal log per eigenvalue is safe.
inline cplx det_power(const MatC& X, double power) {
  Eigen::ComplexEigenSolver<MatC> es(X);
  cplx acc = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) acc += std::log(1.0 - es.eigenvalues()(i));
  return std::exp(power * acc);
}

/// Exact vacuum amplitude <0| U2^dag exp(c_b H_b) U2 |0> with H_b = i(n_b + 1/2),
/// evaluated from the pair matrix of U2|0>; free of matrix-log branch choices.
inline cplx conjugated_cartan_amplitude(const MatC& Z2, const Vec& c) {
  int n = int(Z2.rows());
  VecC d(n);
  for (int k = 0; k < n; ++k) d(k) = std::exp(I * c(k));
  MatC DZD = d.asDiagonal() * Z2 * d.asDiagonal();
  cplx norm2 = det_power(4.0 * Z2 * Z2.conjugate(), 0.5);          // = |<0|U2|0>|^2
  cplx over = det_power(4.0 * DZD * Z2.conjugate(), -0.5);
  return std::exp(0.5 * I * c.sum()) * norm2 * over;
}

class BosonFamily {
 public:
  using Group = Mat;

  explicit BosonFamily(int n_modes) : n_(n_modes), spec_(lie::make_sp(n_modes)) {
    require(n_modes > 0, ErrorKind::Input, "BosonFamily: need at least one mode");
  }

  int rank() const { return n_; }
  int n_wops() const { return 2 * n_; }
  int mode_of(int j) const { return j % n_; }
  double wdir(int j) const { return j < n_ ? -1.0 : 1.0; }  // a lowers, adag raises
  int dagger_op(int j) const { return j < n_ ? j + n_ : j - n_; }
  Vec mu() const { return Vec::Constant(n_, 0.5); }
  const lie::AlgebraSpec& algebra() const { return spec_; }

  Group identity_group() const { return Mat::Identity(2 * n_, 2 * n_); }

  /// coords over the sp(2N,R) Z basis of the algebra spec.
  Group group_from_coords(const Vec& coords) const {
    require(coords.size() == spec_.dim, ErrorKind::Input, "boson group coords: wrong length");
    MatC m = spec_.realize_z(coords.cast<cplx>()).exp();
    require(m.imag().cwiseAbs().maxCoeff() < 1e-12, ErrorKind::Input,
            "boson group element not real");
    return m.real();
  }

  /// exp(c_k H_k): phase-space rotation q -> cos(c) q - sin(c) p.
  Group cartan_group(const Vec& c) const {
    Mat S = Mat::Zero(2 * n_, 2 * n_);
    for (int k = 0; k < n_; ++k) {
      S(k, k) = std::cos(c(k));
      S(k, n_ + k) = -std::sin(c(k));
      S(n_ + k, k) = std::sin(c(k));
      S(n_ + k, n_ + k) = std::cos(c(k));
    }
    return S;
  }

  Group mul(const Group& a, const Group& b) const { return a * b; }
  Group inverse(const Group& a) const { return a.inverse(); }
  double group_defect(const Group& g) const { return symplectic_defect(g); }

  /// U(S)^dag L_j U(S) on the ladder basis = (W S W^{-1})_{jm} L_m.
  MatC ad_mix(const Group& S) const { return ladder_map(n_) * S.cast<cplx>() * ladder_map_inv(n_); }

  Expr expand_op(const std::string& name, int k) const {
    require(k >= 0 && k < n_, ErrorKind::Input, "boson op index out of range: " + name);
    double r = 1.0 / std::sqrt(2.0);
    int A = k, D = n_ + k;
    if (name == "a") return {{1.0, {A}}};
    if (name == "adag") return {{1.0, {D}}};
    if (name == "q") return {{r, {A}}, {r, {D}}};
    if (name == "p") return {{-I * r, {A}}, {I * r, {D}}};
    if (name == "n") return {{1.0, {D, A}}};
    fail(ErrorKind::Parse, "unknown boson operator '" + name + "' (use q/p/a/adag/n)");
  }

  int n_group_params() const { return spec_.dim; }
  /// Insertion expr of the algebra basis element Z_i = (i/2) x^T h x, expanded
  /// into ordered ladder monomials.  h = Omega K for the defining matrix K.
  Expr group_tangent_op(int dir) const {
    Mat h = omega(n_) * spec_.fundamental_rep[dir].real();
    MatC W = ladder_map_inv(n_);  // x_a = W(a,j) ladder_j
    Expr out;
    for (int a = 0; a < 2 * n_; ++a)
      for (int b = 0; b < 2 * n_; ++b) {
        if (h(a, b) == 0.0) continue;
        // (i/2) h_ab x_a x_b with x_a expanded on ladder ops
        for (int ja = 0; ja < 2 * n_; ++ja)
          for (int jb = 0; jb < 2 * n_; ++jb) {
            cplx coeff = 0.5 * I * h(a, b) * W(a, ja) * W(b, jb);
            if (std::abs(coeff) > 1e-15) out.push_back({coeff, {ja, jb}});
          }
      }
    return out;
  }
  /// H_a H_b insertion = -(n_a + 1/2)(n_b + 1/2) expanded in ladder monomials.
  Expr cartan_pair_op(int a, int b) const {
    int Aa = a, Da = n_ + a, Ab = b, Db = n_ + b;
    return {{-1.0, {Da, Aa, Db, Ab}}, {-0.5, {Da, Aa}}, {-0.5, {Db, Ab}}, {-0.25, {}}};
  }

  // --- evaluation of standard terms -------------------------------------

  struct StateCtx {
    Group g2;
    MatC Z2;  // pair matrix of U(g2)|0>
  };

  StateCtx make_ctx(const Group& g2) const { return {g2, pair_matrix(g2)}; }

  struct TermData {
    cplx r0;
    MatC Q;        // R G0 R^T on the ladder basis
    MatC Qeff;     // mix Q mix^T (fast path)
    Group merged;  // g2^{-1} exp(c.H) g2
  };

  TermData term_data(const StateCtx& ctx, const Vec& c) const {
    TermData td;
    td.merged = ctx.g2.inverse() * cartan_group(c) * ctx.g2;
    GaussData gd = a_plus_blocks(td.merged);  // phase comes from the exact amplitude
    MatC W = ladder_map(n_), Winv = ladder_map_inv(n_);
    MatC Rl = W * r_matrix_boson(gd.A_plus) * Winv;
    MatC G0 = MatC::Zero(2 * n_, 2 * n_);
    for (int k = 0; k < n_; ++k) G0(k, n_ + k) = 1.0;  // <a_k adag_k> = 1
    td.Q = Rl * G0 * Rl.transpose();
    td.r0 = conjugated_cartan_amplitude(ctx.Z2, c);
    return td;
  }

  void fold_mixer(TermData& td, const MatC& mix) const { td.Qeff = mix * td.Q * mix.transpose(); }

  cplx eval_indices(const TermData& td, const std::vector<int>& js) const {
    int m = int(js.size());
    if (m % 2 == 1) return 0.0;
    int pos[16];
    require(m <= 16, ErrorKind::Input, "monomial too long for the pairing evaluator");
    for (int p = 0; p < m; ++p) pos[p] = p;
    return td.r0 * pair_over(td.Qeff, js.data(), pos, m, false);
  }

  cplx eval_term(const TermData& td, const std::vector<VecC>& rows) const {
    size_t m = rows.size();
    if (m % 2 == 1) return 0.0;
    MatC P(m, m);
    for (size_t p = 0; p < m; ++p)
      for (size_t q = 0; q < m; ++q) P(p, q) = rows[p].transpose() * td.Q * rows[q];
    std::vector<int> idx(m);
    for (size_t p = 0; p < m; ++p) idx[p] = int(p);
    return td.r0 * pair_sum(P, idx);
  }

  /// A+/A0/r0 with r0 through the principal-branch matrix log (generic terms);
  /// pipeline terms use the exact conjugated-Cartan amplitude instead.
  GaussData gauss_of_matrix(const Group& S) const { return a_plus_from_S(S); }

 private:
  int n_;
  lie::AlgebraSpec spec_;
};

}  // namespace gcs::boson
