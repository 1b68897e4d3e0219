#pragma once

// N spin-1/2 sites: SU(2)^N group data, analytic per-site Gauss split, R matrix,
// lowest-weight moments and the weight-basis hooks used by the pushdown pipeline.

#include <memory>
#include <string>
#include <vector>

#include "gcs/common.hpp"
#include "gcs/lie_core.hpp"
#include "gcs/operator_expr.hpp"

namespace gcs::spin {

/// exp(i (Kx sx + Ky sy + Kz sz)) in closed form.
inline Mat2C su2_exp(double kx, double ky, double kz) {
  double phi = std::sqrt(kx * kx + ky * ky + kz * kz);
  double c = std::cos(phi), s = phi < 1e-30 ? 1.0 : std::sin(phi) / phi;
  Mat2C m;
  m << cplx(c, s * kz), cplx(s * ky, s * kx), cplx(-s * ky, s * kx), cplx(c, -s * kz);
  return m;
}

/// Per-site Gauss factors of a 2x2 group element u (std sigma_pm normalization):
/// u = e^{A+ s+} e^{(A0/2) s3} e^{A- s-} with e^{-A0/2} = u(1,1).
struct SiteGauss {
  cplx A_plus, A_zero, A_minus;
};

inline SiteGauss gauss_split_matrix(const Mat2C& u) {
  cplx d = u(1, 1);
  require(std::abs(d) > 1e-12, ErrorKind::DecompositionBreakdown,
          "spin Gauss split at an antipodal point (u(1,1) = 0)");
  return {u(0, 1) / d, -2.0 * std::log(d), u(1, 0) / d};
}

/// Closed-form split of exp(K+ s+ + i(K0/2) s3 - conj(K+) s-), std sigma_pm.
/// The Cartan coefficient enters as i K0/2 on sigma_3; with phi^2 = |K+|^2 + K0^2/4:
///   A0 = -2 log(cos phi - (i/2) K0 sin(phi)/phi)
///   A+ =  K+ (sin phi/phi) / (cos phi - (i/2) K0 sin(phi)/phi)
///   A- = -conj(K+) (sin phi/phi) / (cos phi - (i/2) K0 sin(phi)/phi)
/// (conventions fixed against the dense 2x2 exponential).
inline SiteGauss bch_split_su2(cplx K0, cplx K_plus) {
  cplx phi2 = K0 * K0 / 4.0 + std::norm(K_plus);
  cplx phi = std::sqrt(phi2);
  cplx c = std::cos(phi);
  cplx s = std::abs(phi) < 1e-12 ? cplx(1.0) - phi2 / 6.0 : std::sin(phi) / phi;
  cplx den = c - 0.5 * I * K0 * s;
  require(std::abs(den) > 1e-12, ErrorKind::DecompositionBreakdown,
          "bch_split_su2: cos(phi) - (i/2) K0 sin(phi)/phi vanishes (antipodal point)");
  return {K_plus * s / den, -2.0 * std::log(den), -std::conj(K_plus) * s / den};
}

/// 3x3 matrix R with e^{A- E-} sigma_i = R_ij sigma_j e^{A- E-} in the (1,2,3)
/// Pauli basis, where E- = (sigma_1 - i sigma_2)/(2 sqrt 2).  Quadratic in A-
/// because (i L1 + L2)^3 = 0.  Sign convention fixed by the displayed operator
/// identity; it corresponds to A- -> -A- relative to the matrix printed in the
/// reference derivation of the same object.
inline Eigen::Matrix3cd r_matrix_su2(cplx A_minus) {
  cplx a = A_minus / std::sqrt(2.0);
  Eigen::Matrix3cd R;
  R << 1.0 - a * a / 2.0, I * a * a / 2.0, -a,
       I * a * a / 2.0, 1.0 + a * a / 2.0, I * a,
       a, -I * a, 1.0;
  return R;
}

/// Same pushthrough in the weight basis (sigma_+, sigma_-, sigma_3), std
/// normalization: A_minus multiplies sigma_-^{std}.
inline Eigen::Matrix3cd r_matrix_weight_basis(cplx A_minus) {
  Eigen::Matrix3cd R = Eigen::Matrix3cd::Identity();
  R(0, 1) = -A_minus * A_minus;  // sigma_+ -> sigma_+ - A- sigma_3 - A-^2 sigma_-
  R(0, 2) = -A_minus;
  R(2, 1) = 2.0 * A_minus;       // sigma_3 -> sigma_3 + 2 A- sigma_-
  return R;
}

/// <down| sigma_{m1} ... sigma_{mn} |down> for one site, m in the weight basis
/// (0: sigma_+, 1: sigma_-, 2: sigma_3).
inline cplx base_moment_site(const std::vector<int>& ms) {
  Mat2C prod = Mat2C::Identity();
  for (int m : ms) {
    Mat2C s;
    switch (m) {
      case 0: s << 0, 1, 0, 0; break;
      case 1: s << 0, 0, 1, 0; break;
      default: s << 1, 0, 0, -1; break;
    }
    prod = prod * s;
  }
  return prod(1, 1);
}

/// Weight-basis operator indexing for N sites: j = 3 k + d with d = 0 (sigma_+),
/// 1 (sigma_-), 2 (sigma_3).
class SpinFamily {
 public:
  using Group = std::vector<Mat2C>;

  explicit SpinFamily(int n_sites) : n_(n_sites) {
    require(n_sites > 0, ErrorKind::Input, "SpinFamily: need at least one site");
  }

  /// su(2)^N spec (built on first use; only needed by chart corrections and
  /// cross-checks against the generic machinery).
  const lie::AlgebraSpec& algebra() const {
    if (!spec_) spec_ = std::make_shared<lie::AlgebraSpec>(lie::make_su2_product(n_));
    return *spec_;
  }

  int rank() const { return n_; }
  int n_wops() const { return 3 * n_; }
  int mode_of(int j) const { return j / 3; }
  double wdir(int j) const {
    int d = j % 3;
    return d == 0 ? 1.0 : (d == 1 ? -1.0 : 0.0);
  }
  int dagger_op(int j) const {
    int d = j % 3;
    return d == 2 ? j : (d == 0 ? j + 1 : j - 1);
  }
  Vec mu() const { return Vec::Constant(n_, -0.5); }

  Group identity_group() const { return Group(n_, Mat2C::Identity()); }

  /// coords: 3 reals per site, U = prod_k exp(i K^{i,k} sigma_i^k).
  Group group_from_coords(const Vec& coords) const {
    require(coords.size() == 3 * n_, ErrorKind::Input, "spin group coords: need 3 per site");
    Group g(n_);
    for (int k = 0; k < n_; ++k) g[k] = su2_exp(coords(3 * k), coords(3 * k + 1), coords(3 * k + 2));
    return g;
  }

  /// exp(c_k H_k) with H_k = (i/2) sigma_3^k.
  Group cartan_group(const Vec& c) const {
    Group g(n_);
    for (int k = 0; k < n_; ++k) {
      Mat2C m = Mat2C::Zero();
      m(0, 0) = std::exp(I * c(k) / 2.0);
      m(1, 1) = std::exp(-I * c(k) / 2.0);
      g[k] = m;
    }
    return g;
  }

  Group mul(const Group& a, const Group& b) const {
    Group g(n_);
    for (int k = 0; k < n_; ++k) g[k] = a[k] * b[k];
    return g;
  }
  Group inverse(const Group& a) const {
    Group g(n_);
    for (int k = 0; k < n_; ++k) g[k] = a[k].inverse();
    return g;
  }

  double group_defect(const Group& g) const {
    double worst = 0;
    for (const auto& u : g)
      worst = std::max(worst, ((u.adjoint() * u) - Mat2C::Identity()).cwiseAbs().maxCoeff());
    return worst;
  }

  /// U(g)^dag O_j U(g) = sum_m ad(j,m) O_m on the weight basis; block per site.
  MatC ad_mix(const Group& g) const {
    MatC ad = MatC::Zero(3 * n_, 3 * n_);
    for (int k = 0; k < n_; ++k) {
      Mat2C basis[3];
      basis[0] << 0, 1, 0, 0;
      basis[1] << 0, 0, 1, 0;
      basis[2] << 1, 0, 0, -1;
      // solve via the trace pairing: tr(s+ s-) = tr(s- s+) = 1, tr(s3 s3) = 2
      for (int d = 0; d < 3; ++d) {
        Mat2C v = g[k].adjoint() * basis[d] * g[k];
        ad(3 * k + d, 3 * k + 0) = (v * basis[1]).trace();        // coeff on sigma_+
        ad(3 * k + d, 3 * k + 1) = (v * basis[0]).trace();        // coeff on sigma_-
        ad(3 * k + d, 3 * k + 2) = (v * basis[2]).trace() / 2.0;  // coeff on sigma_3
      }
    }
    return ad;
  }

  Expr expand_op(const std::string& name, int k) const {
    require(k >= 0 && k < n_, ErrorKind::Input, "spin op index out of range: " + name);
    int P = 3 * k, M = 3 * k + 1, Z = 3 * k + 2;
    if (name == "sx") return {{1.0, {P}}, {1.0, {M}}};
    if (name == "sy") return {{-I, {P}}, {I, {M}}};
    if (name == "sz") return {{1.0, {Z}}};
    if (name == "sp") return {{1.0, {P}}};
    if (name == "sm") return {{1.0, {M}}};
    fail(ErrorKind::Parse, "unknown spin operator '" + name + "' (use sx/sy/sz/sp/sm)");
  }

  /// Tangent directions: 3 per site, insertion i sigma_i^k.
  int n_group_params() const { return 3 * n_; }
  Expr group_tangent_op(int dir) const {
    int k = dir / 3, i = dir % 3;
    Expr sigma = expand_op(i == 0 ? "sx" : (i == 1 ? "sy" : "sz"), k);
    for (auto& t : sigma) t.coeff *= I;
    return sigma;
  }
  /// H_a H_b insertion = -(1/4) sigma_3^a sigma_3^b.
  Expr cartan_pair_op(int a, int b) const { return {{-0.25, {3 * a + 2, 3 * b + 2}}}; }

  // --- evaluation of standard terms -------------------------------------

  struct StateCtx {
    Group g2;
  };
  StateCtx make_ctx(const Group& g2) const { return {g2}; }

  struct TermData {
    std::vector<Mat2C> u;              // per-site group element of the term
    std::vector<cplx> prefactor;       // e^{s A0} = u(1,1) per site
    std::vector<Eigen::Matrix3cd> R;   // weight-basis pushthrough per site
    std::vector<Mat2C> op_mat;         // folded per-op 2x2 operators (fast path)
    std::vector<int> op_site;
  };

  /// g2-conjugated Cartan element exp(c.H) with its per-site Gauss data.
  TermData term_data(const StateCtx& ctx, const Vec& c) const {
    TermData td;
    td.u.resize(n_);
    td.prefactor.resize(n_);
    td.R.resize(n_);
    Group rot = cartan_group(c);
    for (int k = 0; k < n_; ++k) {
      td.u[k] = ctx.g2[k].inverse() * rot[k] * ctx.g2[k];
      SiteGauss sg = gauss_split_matrix(td.u[k]);
      td.prefactor[k] = td.u[k](1, 1);
      td.R[k] = r_matrix_weight_basis(sg.A_minus);
    }
    return td;
  }

  /// Pre-fold mixing rows into per-operator 2x2 matrices for eval_indices.
  void fold_mixer(TermData& td, const MatC& mix) const {
    static const Mat2C wop[3] = {(Mat2C() << 0, 1, 0, 0).finished(),
                                 (Mat2C() << 0, 0, 1, 0).finished(),
                                 (Mat2C() << 1, 0, 0, -1).finished()};
    td.op_mat.resize(3 * n_);
    td.op_site.resize(3 * n_);
    for (int j = 0; j < 3 * n_; ++j) {
      int site = j / 3;  // per-site mixing keeps rows site-local
      Eigen::Vector3cd pushed = td.R[site].transpose() * mix.row(j).segment(3 * site, 3).transpose();
      td.op_mat[j] = pushed(0) * wop[0] + pushed(1) * wop[1] + pushed(2) * wop[2];
      td.op_site[j] = site;
    }
  }

  cplx eval_indices(const TermData& td, const std::vector<int>& js) const {
    std::vector<Mat2C> chain(n_, Mat2C::Identity());
    for (int j : js) chain[td.op_site[j]] = chain[td.op_site[j]] * td.op_mat[j];
    cplx total = 1.0;
    for (int k = 0; k < n_; ++k) total *= td.prefactor[k] * chain[k](1, 1);
    return total;
  }

  /// e^{i A0 . mu} prod R contractions applied to per-slot rows, evaluated as
  /// per-site 2x2 chains of the pushed-through operators.  Every mixing matrix
  /// in the pipeline is block per site, so each slot row lives on one site.
  cplx eval_term(const TermData& td, const std::vector<VecC>& rows) const {
    static const Mat2C wop[3] = {(Mat2C() << 0, 1, 0, 0).finished(),
                                 (Mat2C() << 0, 0, 1, 0).finished(),
                                 (Mat2C() << 1, 0, 0, -1).finished()};
    cplx total = 1.0;
    std::vector<Mat2C> chain(n_, Mat2C::Identity());
    for (const auto& row : rows) {
      int site = -1;
      for (int k = 0; k < n_; ++k) {
        if (row.segment(3 * k, 3).cwiseAbs().maxCoeff() != 0.0) {
          require(site < 0, ErrorKind::Input, "spin eval: slot row spans several sites");
          site = k;
        }
      }
      if (site < 0) return 0.0;
      Eigen::Vector3cd pushed = td.R[site].transpose() * row.segment(3 * site, 3);
      chain[site] = chain[site] * (pushed(0) * wop[0] + pushed(1) * wop[1] + pushed(2) * wop[2]);
    }
    for (int k = 0; k < n_; ++k) total *= td.prefactor[k] * chain[k](1, 1);
    return total;
  }

 private:
  int n_;
  mutable std::shared_ptr<lie::AlgebraSpec> spec_;
};

}  // namespace gcs::spin
