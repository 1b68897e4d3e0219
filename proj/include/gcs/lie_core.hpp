#pragma once

// Abstract Lie-algebra infrastructure: bases, structure constants, Cartan/root data
// and adjoint actions, shared by the concrete operator families.

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "gcs/common.hpp"

namespace gcs::lie {

struct Root {
  Vec eta;            // length ell
  int sign = +1;      // +1 positive, -1 negative
  VecC e_coeffs;      // E_eta = e_coeffs^i Z_i
};

/// One Lie-algebra family instance.  Basis operators Z_i are anti-Hermitian in the
/// fundamental representation and satisfy [Z_i, Z_j] = c[i][j][k] Z_k with real c.
/// Ordered complexified basis: (H_1..H_ell, E_{+eta_1}.., E_{-eta_1}..), positive
/// roots first, negative roots paired in the same order.
struct AlgebraSpec {
  std::string name;
  int dim = 0;
  int rank = 0;
  std::vector<Mat> structure;   // structure[i](j,k) = c[i][j][k]
  Mat cartan_coeffs;            // rank x dim, H_a = cartan_coeffs(a,i) Z_i
  std::vector<Root> roots;      // 2*(dim-rank)/2 entries, positive block then negative block
  MatC basis_change;            // y = basis_change * x maps Z-coords x to (H,E)-coords y
  MatC basis_change_inv;
  std::vector<MatC> fundamental_rep;

  int n_pos() const { return (dim - rank) / 2; }

  /// Fundamental-rep matrix of a complexified element given Z-basis coordinates.
  MatC realize_z(const VecC& x) const {
    MatC m = MatC::Zero(fundamental_rep[0].rows(), fundamental_rep[0].cols());
    for (int i = 0; i < dim; ++i) m += x(i) * fundamental_rep[i];
    return m;
  }

  /// Fundamental-rep matrix of the a-th ordered (H,E) basis element.
  MatC realize_ordered(int a) const { return realize_z(basis_change_inv.col(a)); }

  /// Structure constants of the ordered complexified basis:
  /// [B_a, B_b] = f(a,b,g) B_g.  Computed lazily from the fundamental rep.
  const std::vector<MatC>& complexified_structure() const {
    if (cplx_structure_.empty()) build_complexified();
    return cplx_structure_;
  }

  /// Matrix of X -> [K, X] on ordered-basis coordinates, K given in ordered coords.
  MatC ad_ordered(const VecC& k_ordered) const {
    const auto& f = complexified_structure();
    MatC ad = MatC::Zero(dim, dim);
    for (int a = 0; a < dim; ++a) {
      if (k_ordered(a) == cplx(0, 0)) continue;
      ad += k_ordered(a) * f[a];
    }
    return ad;
  }

 private:
  void build_complexified() const {
    // f[a](g,b): [B_a, B_b] = sum_g f[a](g,b) B_g, solved through the trace inner
    // product kappa_ij = tr(B_i B_j^dag).
    std::vector<MatC> mats(dim);
    for (int a = 0; a < dim; ++a) mats[a] = realize_ordered(a);
    MatC kappa(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) kappa(i, j) = (mats[i] * mats[j].adjoint()).trace();
    Eigen::PartialPivLU<MatC> lu(kappa.transpose());
    cplx_structure_.assign(dim, MatC::Zero(dim, dim));
    for (int a = 0; a < dim; ++a) {
      for (int b = 0; b < dim; ++b) {
        MatC com = mats[a] * mats[b] - mats[b] * mats[a];
        VecC rhs(dim);
        for (int g = 0; g < dim; ++g) rhs(g) = (com * mats[g].adjoint()).trace();
        VecC coeff = lu.solve(rhs);
        for (int g = 0; g < dim; ++g) cplx_structure_[a](g, b) = coeff(g);
      }
    }
  }
  mutable std::vector<MatC> cplx_structure_;
};

namespace detail {

/// Expand a matrix on a matrix basis via the trace inner product.
inline VecC trace_coords(const MatC& m, const std::vector<MatC>& basis) {
  int n = int(basis.size());
  MatC kappa(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) kappa(i, j) = (basis[i] * basis[j].adjoint()).trace();
  VecC rhs(n);
  for (int i = 0; i < n; ++i) rhs(i) = (m * basis[i].adjoint()).trace();
  return kappa.transpose().partialPivLu().solve(rhs);
}

inline void finish_spec(AlgebraSpec& s) {
  // structure constants from the fundamental rep
  int n = s.dim;
  MatC kappa(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      kappa(i, j) = (s.fundamental_rep[i] * s.fundamental_rep[j].adjoint()).trace();
  Eigen::PartialPivLU<MatC> lu(kappa.transpose());
  s.structure.assign(n, Mat::Zero(n, n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      MatC com = s.fundamental_rep[i] * s.fundamental_rep[j] -
                 s.fundamental_rep[j] * s.fundamental_rep[i];
      VecC rhs(n);
      for (int k = 0; k < n; ++k) rhs(k) = (com * s.fundamental_rep[k].adjoint()).trace();
      VecC c = lu.solve(rhs);
      for (int k = 0; k < n; ++k) {
        require(std::abs(c(k).imag()) < 1e-10, ErrorKind::Input,
                "structure constants of " + s.name + " not real");
        s.structure[i](j, k) = c(k).real();
      }
    }
  }
  // basis change: columns of P are Z-coords of (H_a.., E_eta..)
  MatC P(n, n);
  for (int a = 0; a < s.rank; ++a)
    P.col(a) = s.cartan_coeffs.row(a).transpose().cast<cplx>();
  for (int r = 0; r < int(s.roots.size()); ++r) P.col(s.rank + r) = s.roots[r].e_coeffs;
  s.basis_change_inv = P;
  s.basis_change = P.partialPivLu().inverse();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Shipped algebra instances
// ---------------------------------------------------------------------------

inline Mat2C pauli(int i) {
  Mat2C m;
  switch (i) {
    case 0: m << 0, 1, 1, 0; break;
    case 1: m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

/// su(2) with Z_i = i sigma_i, H = (i/2) sigma_3, root operators in the
/// (1/(2 sqrt 2))(sigma_1 +- i sigma_2) normalization.
inline AlgebraSpec make_su2() {
  AlgebraSpec s;
  s.name = "su2";
  s.dim = 3;
  s.rank = 1;
  s.fundamental_rep = {I * pauli(0), I * pauli(1), I * pauli(2)};
  s.cartan_coeffs = Mat::Zero(1, 3);
  s.cartan_coeffs(0, 2) = 0.5;
  double c = 1.0 / (2.0 * std::sqrt(2.0));
  Root rp, rm;
  rp.eta = Vec::Constant(1, 1.0);
  rp.sign = +1;
  rp.e_coeffs = VecC(3);
  rp.e_coeffs << cplx(0, -c), cplx(c, 0), 0.0;  // E_+ = c(-i Z_1 + Z_2)
  rm.eta = Vec::Constant(1, -1.0);
  rm.sign = -1;
  rm.e_coeffs = VecC(3);
  rm.e_coeffs << cplx(0, -c), cplx(-c, 0), 0.0;
  s.roots = {rp, rm};
  detail::finish_spec(s);
  return s;
}

namespace detail {

inline Mat omega(int n_modes) {
  Mat om = Mat::Zero(2 * n_modes, 2 * n_modes);
  om.topRightCorner(n_modes, n_modes).setIdentity();
  om.bottomLeftCorner(n_modes, n_modes) = -Mat::Identity(n_modes, n_modes);
  return om;
}

/// Defining-rep matrix of the boson quadratic (i/2) x^T h x: K = -Omega h.
inline MatC boson_quad(const MatC& h, int n_modes) { return -omega(n_modes).cast<cplx>() * h; }

/// Single-ladder-operator coordinate row in the (q.. , p..) quadrature basis.
inline VecC ladder_row(int mode, bool dagger, int n_modes) {
  VecC v = VecC::Zero(2 * n_modes);
  v(mode) = 1.0 / std::sqrt(2.0);
  v(n_modes + mode) = (dagger ? cplx(0, -1) : cplx(0, 1)) / std::sqrt(2.0);
  return v;
}

}  // namespace detail

/// sp(2N,R) in the defining 2N x 2N rep.  Z basis: K = -Omega h over the symmetric
/// h basis (diagonal E_aa first, then E_ab + E_ba for a<b).  Cartan operators are
/// H_k = i(n_k + 1/2); positive roots are i adag_k adag_l (k<=l) and adag_k a_l (k<l).
inline AlgebraSpec make_sp(int n_modes) {
  int tn = 2 * n_modes;
  AlgebraSpec s;
  s.name = "sp(" + std::to_string(tn) + ",R)";
  s.rank = n_modes;
  std::vector<MatC> hs;
  for (int a = 0; a < tn; ++a) {
    MatC e = MatC::Zero(tn, tn);
    e(a, a) = 1.0;
    hs.push_back(e);
  }
  for (int a = 0; a < tn; ++a)
    for (int b = a + 1; b < tn; ++b) {
      MatC e = MatC::Zero(tn, tn);
      e(a, b) = e(b, a) = 1.0;
      hs.push_back(e);
    }
  s.dim = int(hs.size());
  for (auto& h : hs) s.fundamental_rep.push_back(detail::boson_quad(h, n_modes));
  s.cartan_coeffs = Mat::Zero(n_modes, s.dim);
  for (int k = 0; k < n_modes; ++k) {
    MatC h = MatC::Zero(tn, tn);
    h(k, k) = h(n_modes + k, n_modes + k) = 1.0;
    VecC co = detail::trace_coords(detail::boson_quad(h, n_modes), s.fundamental_rep);
    s.cartan_coeffs.row(k) = co.real().transpose();
  }
  // root operators built from ladder bilinears; the quadratic form of an ordered
  // product drops its scalar part, which the defining rep cannot see anyway
  auto quad_coords = [&](const VecC& u, const VecC& v, cplx w) {
    MatC t = w * (u * v.transpose());
    MatC h = (t + t.transpose()) / cplx(0, 1);  // (i/2) h = sym(t)  =>  h = 2 sym(t) / i... see below
    // sym(t) = (t + t^T)/2 and (i/2) h = sym(t)  =>  h = -2i sym(t) = (t + t^T)/i
    return detail::trace_coords(detail::boson_quad(h, n_modes), s.fundamental_rep);
  };
  std::vector<Root> pos, neg;
  for (int k = 0; k < n_modes; ++k)
    for (int l = k; l < n_modes; ++l) {
      Vec eta = Vec::Zero(n_modes);
      eta(k) += 1;
      eta(l) += 1;
      VecC ad_k = detail::ladder_row(k, true, n_modes), ad_l = detail::ladder_row(l, true, n_modes);
      VecC a_k = detail::ladder_row(k, false, n_modes), a_l = detail::ladder_row(l, false, n_modes);
      pos.push_back({eta, +1, quad_coords(ad_k, ad_l, cplx(0, 1))});   // i adag_k adag_l
      neg.push_back({-eta, -1, quad_coords(a_k, a_l, cplx(0, 1))});    // i a_k a_l
    }
  for (int k = 0; k < n_modes; ++k)
    for (int l = k + 1; l < n_modes; ++l) {
      Vec eta = Vec::Zero(n_modes);
      eta(k) += 1;
      eta(l) -= 1;
      VecC ad_k = detail::ladder_row(k, true, n_modes), a_l = detail::ladder_row(l, false, n_modes);
      VecC a_k = detail::ladder_row(k, false, n_modes), ad_l = detail::ladder_row(l, true, n_modes);
      pos.push_back({eta, +1, quad_coords(ad_k, a_l, 1.0)});   // adag_k a_l
      neg.push_back({-eta, -1, quad_coords(a_k, ad_l, 1.0)});  // a_k adag_l
    }
  s.roots = pos;
  s.roots.insert(s.roots.end(), neg.begin(), neg.end());
  detail::finish_spec(s);
  return s;
}

/// so(2N,R) in the defining rep (Majorana basis).  Z basis: E_ab - E_ba for a<b.
/// Cartan operators H_k = i(n_k - 1/2) = -gamma_k gammabar_k; roots are the
/// fermionic pair/number bilinears.
inline AlgebraSpec make_so(int n_modes) {
  int tn = 2 * n_modes;
  AlgebraSpec s;
  s.name = "so(" + std::to_string(tn) + ",R)";
  s.rank = n_modes;
  for (int a = 0; a < tn; ++a)
    for (int b = a + 1; b < tn; ++b) {
      MatC e = MatC::Zero(tn, tn);
      e(a, b) = 1.0;
      e(b, a) = -1.0;
      s.fundamental_rep.push_back(e);
    }
  s.dim = int(s.fundamental_rep.size());
  s.cartan_coeffs = Mat::Zero(n_modes, s.dim);
  for (int k = 0; k < n_modes; ++k) {
    MatC K = MatC::Zero(tn, tn);
    K(k, n_modes + k) = -1.0;
    K(n_modes + k, k) = 1.0;
    VecC co = detail::trace_coords(K, s.fundamental_rep);
    s.cartan_coeffs.row(k) = co.real().transpose();
  }
  auto quad_coords = [&](const VecC& u, const VecC& v) {
    // (1/2) x^T K x with antisymmetric K realizes u.x v.x up to a scalar
    MatC t = u * v.transpose();
    MatC K = t - t.transpose();
    return detail::trace_coords(K, s.fundamental_rep);
  };
  std::vector<Root> pos, neg;
  for (int k = 0; k < n_modes; ++k)
    for (int l = k + 1; l < n_modes; ++l) {
      Vec eta = Vec::Zero(n_modes);
      eta(k) += 1;
      eta(l) += 1;
      pos.push_back({eta, +1, quad_coords(detail::ladder_row(k, true, n_modes),
                                          detail::ladder_row(l, true, n_modes))});
      neg.push_back({-eta, -1, quad_coords(detail::ladder_row(k, false, n_modes),
                                           detail::ladder_row(l, false, n_modes))});
    }
  for (int k = 0; k < n_modes; ++k)
    for (int l = k + 1; l < n_modes; ++l) {
      Vec eta = Vec::Zero(n_modes);
      eta(k) += 1;
      eta(l) -= 1;
      pos.push_back({eta, +1, quad_coords(detail::ladder_row(k, true, n_modes),
                                          detail::ladder_row(l, false, n_modes))});
      neg.push_back({-eta, -1, quad_coords(detail::ladder_row(k, false, n_modes),
                                           detail::ladder_row(l, true, n_modes))});
    }
  s.roots = pos;
  s.roots.insert(s.roots.end(), neg.begin(), neg.end());
  detail::finish_spec(s);
  return s;
}

/// Direct sum a (+) b with block-diagonal fundamental rep.
inline AlgebraSpec direct_sum(const AlgebraSpec& a, const AlgebraSpec& b) {
  AlgebraSpec s;
  s.name = a.name + "+" + b.name;
  s.dim = a.dim + b.dim;
  s.rank = a.rank + b.rank;
  int ra = int(a.fundamental_rep[0].rows()), rb = int(b.fundamental_rep[0].rows());
  auto embed = [&](const MatC& m, bool first) {
    MatC out = MatC::Zero(ra + rb, ra + rb);
    if (first)
      out.topLeftCorner(ra, ra) = m;
    else
      out.bottomRightCorner(rb, rb) = m;
    return out;
  };
  for (const auto& m : a.fundamental_rep) s.fundamental_rep.push_back(embed(m, true));
  for (const auto& m : b.fundamental_rep) s.fundamental_rep.push_back(embed(m, false));
  s.cartan_coeffs = Mat::Zero(s.rank, s.dim);
  s.cartan_coeffs.topLeftCorner(a.rank, a.dim) = a.cartan_coeffs;
  s.cartan_coeffs.bottomRightCorner(b.rank, b.dim) = b.cartan_coeffs;
  auto lift = [&](const Root& r, bool first) {
    Root out;
    out.sign = r.sign;
    out.eta = Vec::Zero(s.rank);
    out.e_coeffs = VecC::Zero(s.dim);
    if (first) {
      out.eta.head(a.rank) = r.eta;
      out.e_coeffs.head(a.dim) = r.e_coeffs;
    } else {
      out.eta.tail(b.rank) = r.eta;
      out.e_coeffs.tail(b.dim) = r.e_coeffs;
    }
    return out;
  };
  for (int r = 0; r < a.n_pos(); ++r) s.roots.push_back(lift(a.roots[r], true));
  for (int r = 0; r < b.n_pos(); ++r) s.roots.push_back(lift(b.roots[r], false));
  for (int r = a.n_pos(); r < 2 * a.n_pos(); ++r) s.roots.push_back(lift(a.roots[r], true));
  for (int r = b.n_pos(); r < 2 * b.n_pos(); ++r) s.roots.push_back(lift(b.roots[r], false));
  detail::finish_spec(s);
  return s;
}

inline AlgebraSpec make_su2_product(int n_sites) {
  AlgebraSpec s = make_su2();
  for (int k = 1; k < n_sites; ++k) s = direct_sum(s, make_su2());
  s.name = "su2^" + std::to_string(n_sites);
  return s;
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// ad(K) with entries ad(i,j) = K^k c[k][i][j].  Coordinates of [K, X] are
/// ad^T x for X with Z-coordinates x.
inline Mat ad_matrix(const AlgebraSpec& spec, const Vec& K) {
  require(K.size() == spec.dim, ErrorKind::Input, "ad_matrix: K has wrong length");
  Mat ad = Mat::Zero(spec.dim, spec.dim);
  for (int k = 0; k < spec.dim; ++k) {
    if (K(k) == 0.0) continue;
    ad += K(k) * spec.structure[k];
  }
  return ad;
}

/// Ad(g) for g = exp(K^i Z_i), defined by g^{-1} Z_i g = Ad(g)_i^j Z_j.
/// Computed both from exp(ad K) and by trace extraction in the fundamental rep;
/// the two must agree to 1e-10.
inline Mat adjoint_action(const AlgebraSpec& spec, const Vec& K) {
  require(K.size() == spec.dim, ErrorKind::Input, "adjoint_action: K has wrong length");
  // route (a): matrix exponential of ad(K).  With ad(i,j) the coordinates of
  // [K, Z_i] on Z_j, the series e^{-K} Z_i e^{K} = Z_i - [K,Z_i] + ... gives
  // Ad = exp(-ad) as an (i,j) array.
  Mat ad = ad_matrix(spec, K);
  Mat ada = (-ad).exp().eval();
  // route (b): trace extraction with kappa_ij = tr(Z_i Z_j^dag)
  MatC g = spec.realize_z(K.cast<cplx>()).exp();
  MatC ginv = g.inverse();
  int n = spec.dim;
  MatC kappa(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      kappa(i, j) = (spec.fundamental_rep[i] * spec.fundamental_rep[j].adjoint()).trace();
  Eigen::JacobiSVD<MatC> svd(kappa);
  double cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
  require(cond < 1e12, ErrorKind::Config, "adjoint_action: basis inner product is singular");
  Eigen::PartialPivLU<MatC> lu(kappa.transpose());
  Mat adb(n, n);
  for (int i = 0; i < n; ++i) {
    MatC conj = ginv * spec.fundamental_rep[i] * g;
    VecC rhs(n);
    for (int k = 0; k < n; ++k) rhs(k) = (conj * spec.fundamental_rep[k].adjoint()).trace();
    VecC row = lu.solve(rhs);
    for (int j = 0; j < n; ++j) {
      require(std::abs(row(j).imag()) < 1e-8, ErrorKind::Input,
              "adjoint_action: non-real adjoint coefficient");
      adb(i, j) = row(j).real();
    }
  }
  require((ada - adb).cwiseAbs().maxCoeff() < 1e-10, ErrorKind::Input,
          "adjoint_action: exp(ad) and trace extraction disagree");
  return adb;
}

/// Conjugation of the ordered (H,E) basis by exp(K^a H_a): multiplier 1 on each
/// H_a and exp(i eta.K) on each E_eta, i.e. g E_eta g^{-1} = e^{i eta.K} E_eta.
inline VecC complexified_ad(const AlgebraSpec& spec, const Vec& cartan_K) {
  require(cartan_K.size() == spec.rank, ErrorKind::Input, "complexified_ad: wrong length");
  VecC mult(spec.dim);
  for (int a = 0; a < spec.rank; ++a) mult(a) = 1.0;
  for (int r = 0; r < int(spec.roots.size()); ++r)
    mult(spec.rank + r) = std::exp(I * spec.roots[r].eta.dot(cartan_K));
  return mult;
}

namespace detail {
inline MatC dexp_series(const MatC& x) {
  int n = int(x.rows());
  MatC out = MatC::Identity(n, n);
  MatC term = MatC::Identity(n, n);
  for (int k = 1; k < 80; ++k) {
    term = (term * x / double(k + 1)).eval();
    out += term;
    if (term.cwiseAbs().maxCoeff() < 1e-16) break;
  }
  return out;
}
}  // namespace detail

/// dexp factor phi(ad) = ad^{-1}(e^{ad} - 1) = sum ad^n/(n+1)!.  The series is run
/// at norm <= 1 and unscaled with phi(2Y) = phi(Y)(e^Y + 1)/2; ad is frequently
/// nilpotent here, which rules out an eigendecomposition route in production.
inline MatC dexp_factor(const MatC& ad) {
  int n = int(ad.rows());
  double norm = ad.cwiseAbs().rowwise().sum().maxCoeff();
  int halvings = 0;
  MatC x = ad;
  while (norm > 1.0 && halvings < 40) {
    x *= 0.5;
    norm *= 0.5;
    ++halvings;
  }
  MatC out = detail::dexp_series(x);
  if (halvings > 0) {
    MatC ex = x.exp();
    for (int j = 0; j < halvings; ++j) {
      out = (0.5 * out * (ex + MatC::Identity(n, n))).eval();
      ex = (ex * ex).eval();
    }
  }
  return out;
}

/// Eigendecomposition route for phi(ad); valid only on non-defective inputs.
/// Kept as an independent cross-check of the series.
inline MatC dexp_factor_eig(const MatC& ad) {
  int n = int(ad.rows());
  Eigen::ComplexEigenSolver<MatC> es(ad);
  require(es.info() == Eigen::Success, ErrorKind::Integration, "dexp_factor_eig: eigensolver failed");
  VecC lam = es.eigenvalues();
  VecC f(n);
  for (int i = 0; i < n; ++i) {
    cplx z = lam(i);
    if (std::abs(z) < 1e-6) {
      f(i) = 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
    } else {
      f(i) = (std::exp(z) - 1.0) / z;
    }
  }
  return es.eigenvectors() * f.asDiagonal() * es.eigenvectors().inverse();
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Check every AlgebraSpec invariant: antisymmetry, Jacobi, fundamental-rep
/// brackets, commuting Cartan rows, basis_change inverse, root pairing and the
/// bracket relation [H_a, E_eta] = i eta_a E_eta.
inline void validate(const AlgebraSpec& s, double tol = 1e-12) {
  int n = s.dim;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        require(std::abs(s.structure[i](j, k) + s.structure[j](i, k)) < tol, ErrorKind::Input,
                s.name + ": structure constants not antisymmetric");
      }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
          double acc = 0;
          for (int l = 0; l < n; ++l)
            acc += s.structure[i](j, l) * s.structure[l](k, m) +
                   s.structure[j](k, l) * s.structure[l](i, m) +
                   s.structure[k](i, l) * s.structure[l](j, m);
          require(std::abs(acc) < 1e-9, ErrorKind::Input, s.name + ": Jacobi identity fails");
        }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      MatC com =
          s.fundamental_rep[i] * s.fundamental_rep[j] - s.fundamental_rep[j] * s.fundamental_rep[i];
      for (int k = 0; k < n; ++k) com -= s.structure[i](j, k) * s.fundamental_rep[k];
      require(com.cwiseAbs().maxCoeff() < tol, ErrorKind::Input,
              s.name + ": fundamental rep violates structure constants");
    }
  // Cartan rows commute
  for (int a = 0; a < s.rank; ++a)
    for (int b = 0; b < s.rank; ++b) {
      Vec bracket = Vec::Zero(n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          bracket += s.cartan_coeffs(a, i) * s.cartan_coeffs(b, j) * s.structure[i].row(j).transpose();
      require(bracket.cwiseAbs().maxCoeff() < tol, ErrorKind::Input,
              s.name + ": Cartan rows do not commute");
    }
  MatC idc = s.basis_change * s.basis_change_inv;
  require((idc - MatC::Identity(n, n)).cwiseAbs().maxCoeff() < tol, ErrorKind::Input,
          s.name + ": basis_change inverse mismatch");
  // roots come in +- pairs and satisfy the bracket relation in the fundamental rep
  int np = s.n_pos();
  require(int(s.roots.size()) == 2 * np, ErrorKind::Input, s.name + ": root count mismatch");
  for (int r = 0; r < np; ++r) {
    require((s.roots[r].eta + s.roots[np + r].eta).cwiseAbs().maxCoeff() < tol, ErrorKind::Input,
            s.name + ": roots not paired");
    require(s.roots[r].sign == +1 && s.roots[np + r].sign == -1, ErrorKind::Input,
            s.name + ": root signs inconsistent");
  }
  for (int a = 0; a < s.rank; ++a) {
    MatC H = s.realize_z(s.cartan_coeffs.row(a).transpose().cast<cplx>());
    for (const auto& root : s.roots) {
      MatC E = s.realize_z(root.e_coeffs);
      MatC lhs = H * E - E * H;
      require((lhs - I * root.eta(a) * E).cwiseAbs().maxCoeff() < tol, ErrorKind::Input,
              s.name + ": [H,E] = i eta E fails");
    }
  }
}

}  // namespace gcs::lie
