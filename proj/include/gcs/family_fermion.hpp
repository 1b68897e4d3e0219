#pragma once

// Fermionic Gaussian family on N modes: O(2N,R) group data in the Majorana basis,
// Cartan decomposition, analytic A+/A0/r0, R matrix and signed Wick moments.
// Full mirror of the bosonic family with anticommuting statistics.
//
// Majorana ordering x = (gamma_1..gamma_N, gammabar_1..gammabar_N); ladder
// ordering (c_1..c_N, cdag_1..cdag_N) with c = (gamma + i gammabar)/sqrt(2).

#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "gcs/common.hpp"
#include "gcs/family_boson.hpp"  // omega, ladder maps, spd_sqrt, det_power
#include "gcs/lie_core.hpp"
#include "gcs/operator_expr.hpp"

namespace gcs::fermion {

using boson::det_power;
using boson::ladder_map;
using boson::ladder_map_inv;
using boson::omega;

inline double orthogonal_defect(const Mat& G) {
  return (G.transpose() * G - Mat::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
}

struct CartanFactors {
  Mat T;
  Mat u;
  double theta;
};

/// G = u^{-1} T with T = sqrt(-Omega G^T Omega G), u = T G^{-1},
/// theta = -(1/4) tr(Omega log u).  T^2 is not symmetric in general, so the
/// square root is the principal one, defined only for a positive spectrum.
inline CartanFactors cartan_decompose_f(const Mat& G) {
  int n = int(G.rows()) / 2;
  require(orthogonal_defect(G) < 1e-10, ErrorKind::Input, "cartan_decompose_f: G not orthogonal");
  Mat gm = -omega(n) * G.transpose() * omega(n) * G;
  Eigen::ComplexEigenSolver<MatC> ev(gm.cast<cplx>());
  for (int i = 0; i < ev.eigenvalues().size(); ++i) {
    cplx lam = ev.eigenvalues()(i);
    require(std::abs(lam) > 1e-12 && !(lam.real() < 0.0 && std::abs(lam.imag()) < 1e-10),
            ErrorKind::Branch,
            "cartan_decompose_f: spectrum of T^2 touches the square-root branch cut");
  }
  CartanFactors cf;
  MatC Tc = gm.cast<cplx>().sqrt();
  require(Tc.imag().cwiseAbs().maxCoeff() < 1e-9, ErrorKind::Branch,
          "cartan_decompose_f: square root not real");
  cf.T = Tc.real();
  cf.u = cf.T * G.inverse();
  cplx tr = (omega(n).cast<cplx>() * boson::orthosymplectic_log(cf.u)).trace();
  require(std::abs(tr.imag()) < 1e-9, ErrorKind::Branch, "cartan_decompose_f: non-real phase trace");
  cf.theta = -0.25 * tr.real();
  return cf;
}

struct GaussData {
  MatC A_plus;  // N x N complex antisymmetric
  MatC A_zero;
  cplx r0;
};

/// A+ from 2 [[Re A+, Im A+],[Im A+, -Re A+]] = (Gm + 1)(Gm - 1)^{-1} with
/// Gm = Omega G^T Omega G; A0 = (1/4) log(1 - 4 A+ A+^*); no phase computed.
inline GaussData a_plus_blocks_f(const Mat& G) {
  int n = int(G.rows()) / 2;
  Mat gm = omega(n) * G.transpose() * omega(n) * G;
  Mat shifted = gm - Mat::Identity(2 * n, 2 * n);
  Eigen::FullPivLU<Mat> lu(shifted);
  require(lu.isInvertible(), ErrorKind::Input, "a_plus_from_G: Gm - 1 is singular");
  Mat Y = (gm + Mat::Identity(2 * n, 2 * n)) * lu.inverse();
  Mat re = Y.topLeftCorner(n, n) / 2.0, im = Y.topRightCorner(n, n) / 2.0;
  double defect = std::max((Y.bottomRightCorner(n, n) / 2.0 + re).cwiseAbs().maxCoeff(),
                           (re + re.transpose()).cwiseAbs().maxCoeff());
  require(defect < 1e-10, ErrorKind::Input, "a_plus_from_G: block structure violated");
  GaussData g;
  g.A_plus = re.cast<cplx>() + I * im.cast<cplx>();
  MatC one = MatC::Identity(n, n);
  MatC m = one - 4.0 * g.A_plus * g.A_plus.conjugate();
  Eigen::SelfAdjointEigenSolver<MatC> es(m);
  require(es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0.0, ErrorKind::Input,
          "a_plus_from_G: 1 - 4 A+ A+^* not positive definite");
  g.A_zero = 0.25 * (es.eigenvectors() *
                     es.eigenvalues().array().log().matrix().asDiagonal() *
                     es.eigenvectors().adjoint());
  g.r0 = std::exp(-0.25 * es.eigenvalues().array().log().sum());  // |r0| only
  return g;
}

/// Full Gauss data with the r0 phase from the principal-branch decomposition;
/// note the -(1/4) determinant exponent (sign differs from the bosonic case).
inline GaussData a_plus_from_G(const Mat& G) {
  GaussData g = a_plus_blocks_f(G);
  g.r0 = std::abs(g.r0) * std::exp(-I * cartan_decompose_f(G).theta);
  return g;
}

/// Same displayed block form as the bosonic pushthrough, for
/// T- = exp((A+^*) c c) acting on the Majorana vector.
inline MatC r_matrix_fermion(const MatC& A_plus) { return boson::r_matrix_boson(A_plus); }

/// Signed pairing sum (fermionic Wick) over a two-point matrix P(p,q), p < q.
inline cplx pair_sum_signed(const MatC& P, std::vector<int>& idx) {
  size_t m = idx.size();
  if (m % 2 == 1) return 0.0;
  if (m == 0) return 1.0;
  cplx total = 0.0;
  int first = idx[0];
  double sign = 1.0;
  for (size_t j = 1; j < m; ++j) {
    std::vector<int> rest;
    rest.reserve(m - 2);
    for (size_t t = 1; t < m; ++t)
      if (t != j) rest.push_back(idx[t]);
    total += sign * P(first, idx[j]) * pair_sum_signed(P, rest);
    sign = -sign;
  }
  return total;
}

/// Vacuum moments of Majorana monomials with <0| x_i x_j |0> = (delta + i Omega)/2.
inline cplx wick_moments_f(const std::vector<int>& majorana_idx, int n_modes) {
  MatC G = 0.5 * (MatC::Identity(2 * n_modes, 2 * n_modes) + I * omega(n_modes).cast<cplx>());
  MatC P(majorana_idx.size(), majorana_idx.size());
  for (size_t p = 0; p < majorana_idx.size(); ++p)
    for (size_t q = 0; q < majorana_idx.size(); ++q)
      P(p, q) = G(majorana_idx[p], majorana_idx[q]);
  std::vector<int> idx(majorana_idx.size());
  for (size_t p = 0; p < idx.size(); ++p) idx[p] = int(p);
  return pair_sum_signed(P, idx);
}

/// Antisymmetric pair matrix Z of U(G)|0> = <0|U(G)|0> exp(Z_{kl} cdag_k cdag_l)|0>.
inline MatC pair_matrix_f(const Mat& G) {
  int n = int(G.rows()) / 2;
  MatC L = ladder_map(n) * G.inverse().cast<cplx>() * ladder_map_inv(n);
  MatC alpha = L.topLeftCorner(n, n), beta = L.topRightCorner(n, n);
  MatC Z = -0.5 * alpha.partialPivLu().solve(beta);
  require((Z + Z.transpose()).cwiseAbs().maxCoeff() < 1e-9, ErrorKind::Input,
          "pair_matrix_f: result not antisymmetric (G not orthogonal?)");
  return Z;
}

/// Exact <0| U2^dag exp(c_b H_b) U2 |0> with H_b = i(n_b - 1/2); the fermionic
/// pair overlap is det(1 + 4 C B)^{1/2} per eigenvalue pair.
inline cplx conjugated_cartan_amplitude_f(const MatC& Z2, const Vec& c) {
  int n = int(Z2.rows());
  VecC d(n);
  for (int k = 0; k < n; ++k) d(k) = std::exp(I * c(k));
  MatC DZD = d.asDiagonal() * Z2 * d.asDiagonal();
  cplx norm2 = det_power(4.0 * Z2 * Z2.conjugate(), -0.5);        // = |<0|U2|0>|^2 ... 1/<e^Z|e^Z>
  cplx over = det_power(4.0 * DZD * Z2.conjugate(), 0.5);
  return std::exp(-0.5 * I * c.sum()) * norm2 * over;
}

class FermionFamily {
 public:
  using Group = Mat;

  explicit FermionFamily(int n_modes) : n_(n_modes), spec_(lie::make_so(n_modes)) {
    require(n_modes > 0, ErrorKind::Input, "FermionFamily: need at least one mode");
  }

  int rank() const { return n_; }
  int n_wops() const { return 2 * n_; }
  int mode_of(int j) const { return j % n_; }
  double wdir(int j) const { return j < n_ ? -1.0 : 1.0; }
  int dagger_op(int j) const { return j < n_ ? j + n_ : j - n_; }
  Vec mu() const { return Vec::Constant(n_, -0.5); }
  const lie::AlgebraSpec& algebra() const { return spec_; }

  Group identity_group() const { return Mat::Identity(2 * n_, 2 * n_); }

  Group group_from_coords(const Vec& coords) const {
    require(coords.size() == spec_.dim, ErrorKind::Input, "fermion group coords: wrong length");
    MatC m = spec_.realize_z(coords.cast<cplx>()).exp();
    require(m.imag().cwiseAbs().maxCoeff() < 1e-12, ErrorKind::Input,
            "fermion group element not real");
    return m.real();
  }

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
  double group_defect(const Group& g) const { return orthogonal_defect(g); }

  MatC ad_mix(const Group& G) const { return ladder_map(n_) * G.cast<cplx>() * ladder_map_inv(n_); }

  Expr expand_op(const std::string& name, int k) const {
    require(k >= 0 && k < n_, ErrorKind::Input, "fermion op index out of range: " + name);
    double r = 1.0 / std::sqrt(2.0);
    int C = k, D = n_ + k;
    if (name == "c") return {{1.0, {C}}};
    if (name == "cdag") return {{1.0, {D}}};
    if (name == "gamma") return {{r, {C}}, {r, {D}}};
    if (name == "gammabar") return {{-I * r, {C}}, {I * r, {D}}};
    if (name == "nf") return {{1.0, {D, C}}};
    fail(ErrorKind::Parse, "unknown fermion operator '" + name + "' (use c/cdag/gamma/gammabar/nf)");
  }

  int n_group_params() const { return spec_.dim; }
  /// Z_dir = (1/2) x^T K x expanded into ordered Majorana-ladder monomials.
  Expr group_tangent_op(int dir) const {
    Mat K = spec_.fundamental_rep[dir].real();
    MatC W = ladder_map_inv(n_);  // x_a = W(a,j) ladder_j
    Expr out;
    for (int a = 0; a < 2 * n_; ++a)
      for (int b = 0; b < 2 * n_; ++b) {
        if (K(a, b) == 0.0) continue;
        for (int ja = 0; ja < 2 * n_; ++ja)
          for (int jb = 0; jb < 2 * n_; ++jb) {
            cplx coeff = 0.5 * K(a, b) * W(a, ja) * W(b, jb);
            if (std::abs(coeff) > 1e-15) out.push_back({coeff, {ja, jb}});
          }
      }
    return out;
  }
  /// H_a H_b = -(n_a - 1/2)(n_b - 1/2) expanded in ladder monomials.
  Expr cartan_pair_op(int a, int b) const {
    int Ca = a, Da = n_ + a, Cb = b, Db = n_ + b;
    return {{-1.0, {Da, Ca, Db, Cb}}, {0.5, {Da, Ca}}, {0.5, {Db, Cb}}, {-0.25, {}}};
  }

  struct StateCtx {
    Group g2;
    MatC Z2;
  };

  StateCtx make_ctx(const Group& g2) const { return {g2, pair_matrix_f(g2)}; }

  struct TermData {
    cplx r0;
    MatC Q;
    MatC Qeff;
    Group merged;
  };

  TermData term_data(const StateCtx& ctx, const Vec& c) const {
    TermData td;
    td.merged = ctx.g2.inverse() * cartan_group(c) * ctx.g2;
    GaussData gd = a_plus_blocks_f(td.merged);  // phase comes from the exact amplitude
    MatC W = ladder_map(n_), Winv = ladder_map_inv(n_);
    MatC Rl = W * r_matrix_fermion(gd.A_plus) * Winv;
    MatC G0 = MatC::Zero(2 * n_, 2 * n_);
    for (int k = 0; k < n_; ++k) G0(k, n_ + k) = 1.0;  // <c_k cdag_k> = 1
    td.Q = Rl * G0 * Rl.transpose();
    td.r0 = conjugated_cartan_amplitude_f(ctx.Z2, c);
    return td;
  }

  void fold_mixer(TermData& td, const MatC& mix) const { td.Qeff = mix * td.Q * mix.transpose(); }

  cplx eval_indices(const TermData& td, const std::vector<int>& js) const {
    int m = int(js.size());
    if (m % 2 == 1) return 0.0;
    require(m <= 16, ErrorKind::Input, "monomial too long for the pairing evaluator");
    int pos[16];
    for (int p = 0; p < m; ++p) pos[p] = p;
    return td.r0 * boson::pair_over(td.Qeff, js.data(), pos, m, true);
  }

  cplx eval_term(const TermData& td, const std::vector<VecC>& rows) const {
    size_t m = rows.size();
    if (m % 2 == 1) return 0.0;
    MatC P(m, m);
    for (size_t p = 0; p < m; ++p)
      for (size_t q = 0; q < m; ++q) P(p, q) = rows[p].transpose() * td.Q * rows[q];
    std::vector<int> idx(m);
    for (size_t p = 0; p < m; ++p) idx[p] = int(p);
    return td.r0 * pair_sum_signed(P, idx);
  }

  GaussData gauss_of_matrix(const Group& G) const { return a_plus_from_G(G); }

 private:
  int n_;
  lie::AlgebraSpec spec_;
};

}  // namespace gcs::fermion
