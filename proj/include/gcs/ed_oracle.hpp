#pragma once

// Dense Hilbert-space brute-force oracle for all three families at small size.
// Built directly from kron products / truncated ladder matrices / Jordan-Wigner
// strings, independent of the pushdown pipeline it is used to check.

#include <map>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "gcs/common.hpp"
#include "gcs/operator_expr.hpp"

namespace gcs::oracle {

enum class Kind { Spin, Boson, Fermion };

inline MatC kron(const MatC& a, const MatC& b) {
  MatC out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// exp(A) v by scaling and truncated Taylor application; avoids forming exp(A).
inline VecC expm_apply(const MatC& A, VecC v) {
  double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
  int s = std::max(1, int(std::ceil(norm)));
  MatC As = A / double(s);
  for (int i = 0; i < s; ++i) {
    VecC term = v, acc = v;
    for (int k = 1; k < 300; ++k) {
      term = (As * term / double(k)).eval();
      acc += term;
      if (term.cwiseAbs().maxCoeff() < 1e-18 * std::max(1.0, acc.cwiseAbs().maxCoeff())) break;
    }
    v = std::move(acc);
  }
  return v;
}

class DenseSystem {
 public:
  static DenseSystem spin(int n_sites, int dim_cap = 4096) {
    DenseSystem s;
    s.kind_ = Kind::Spin;
    s.n_ = n_sites;
    s.dim_ = 1 << n_sites;
    require(s.dim_ <= dim_cap, ErrorKind::Input, "spin oracle dimension exceeds the cap");
    s.build_spin();
    return s;
  }

  static DenseSystem boson(int n_modes, int cutoff, int dim_cap = 4096) {
    DenseSystem s;
    s.kind_ = Kind::Boson;
    s.n_ = n_modes;
    s.cutoff_ = cutoff;
    s.dim_ = 1;
    for (int k = 0; k < n_modes; ++k) {
      s.dim_ *= cutoff + 1;
      require(s.dim_ <= dim_cap, ErrorKind::Input, "boson oracle dimension exceeds the cap");
    }
    s.build_boson();
    return s;
  }

  static DenseSystem fermion(int n_modes, int dim_cap = 4096) {
    DenseSystem s;
    s.kind_ = Kind::Fermion;
    s.n_ = n_modes;
    s.dim_ = 1 << n_modes;
    require(s.dim_ <= dim_cap, ErrorKind::Input, "fermion oracle dimension exceeds the cap");
    s.build_fermion();
    return s;
  }

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  int dim() const { return dim_; }
  int cutoff() const { return cutoff_; }

  /// |psi> = U(g1) V(M) U(g2) |mu> from the same coordinates make_state consumes.
  /// Applies V exactly as a diagonal in the occupation / sigma_3 eigenbasis.
  VecC build_state(const Vec& k1, const Vec& k2, const Mat& M,
                   double tail_tol = 1e-8) const {
    VecC psi = reference();
    psi = apply_group(k2, std::move(psi));
    VecC diag = v_diagonal(M);
    psi = diag.cwiseProduct(psi);
    psi = apply_group(k1, std::move(psi));
    if (kind_ == Kind::Boson) {
      double tail = tail_weight(psi);
      require(tail < tail_tol, ErrorKind::Cutoff,
              "boson oracle cutoff insufficient (tail weight " + std::to_string(tail) +
                  "); double the cutoff");
    }
    return psi;
  }

  /// Literal dense evaluation <psi| O |psi>.
  cplx expect(const VecC& psi, const OperatorExpr& obs) const {
    cplx total = 0.0;
    for (const auto& term : obs.terms) {
      VecC v = psi;
      for (auto it = term.ops.rbegin(); it != term.ops.rend(); ++it) v = op_matrix(*it) * v;
      total += term.coeff * psi.dot(v);  // Eigen dot conjugates the left argument
    }
    return total;
  }

  const MatC& op_matrix(const OpRef& ref) const {
    auto it = ops_.find(ref.name + "[" + std::to_string(ref.index) + "]");
    require(it != ops_.end(), ErrorKind::Input, "oracle: unknown operator " + ref.name);
    return it->second;
  }

  MatC operator_matrix(const OperatorExpr& obs) const {
    MatC h = MatC::Zero(dim_, dim_);
    for (const auto& term : obs.terms) {
      MatC m = MatC::Identity(dim_, dim_);
      for (const auto& op : term.ops) m = m * op_matrix(op);
      h += term.coeff * m;
    }
    return h;
  }

  /// Ground-state energy of a Hermitian observable.
  double ground_energy(const OperatorExpr& obs) const {
    MatC h = operator_matrix(obs);
    require((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-10, ErrorKind::Input,
            "ground_energy: observable is not Hermitian");
    Eigen::SelfAdjointEigenSolver<MatC> es(h);
    return es.eigenvalues().minCoeff();
  }

  /// Weight on basis states with any mode at the cutoff occupation (bosons).
  double tail_weight(const VecC& psi) const {
    if (kind_ != Kind::Boson) return 0.0;
    double w = 0.0;
    for (int idx = 0; idx < dim_; ++idx) {
      int t = idx;
      bool edge = false;
      for (int k = 0; k < n_; ++k) {
        if (t % (cutoff_ + 1) == cutoff_) edge = true;
        t /= cutoff_ + 1;
      }
      if (edge) w += std::norm(psi(idx));
    }
    return w;
  }

  /// U(coords) |v> without forming the full exponential (bosons/fermions).
  VecC apply_group(const Vec& coords, VecC v) const {
    if (kind_ == Kind::Spin) return group_unitary(coords) * v;
    return expm_apply(quadratic_exponent(coords), std::move(v));
  }

  /// Dense unitary for group coordinates (spin: 3 per site; boson/fermion: the
  /// quadratic-basis coordinates described below).
  MatC group_unitary(const Vec& coords) const {
    switch (kind_) {
      case Kind::Spin: {
        require(coords.size() == 3 * n_, ErrorKind::Input, "spin oracle: need 3 coords per site");
        MatC u = MatC::Identity(1, 1);
        for (int k = 0; k < n_; ++k) {
          MatC site = I * (coords(3 * k) * pauli_[0] + coords(3 * k + 1) * pauli_[1] +
                           coords(3 * k + 2) * pauli_[2]);
          u = kron(u, site.exp().eval());
        }
        return u;
      }
      case Kind::Boson:
      case Kind::Fermion: {
        return quadratic_exponent(coords).exp();
      }
    }
    return MatC();
  }

  /// Exponent of the Gaussian unitary: boson (i/2) x^T h x summed over the
  /// symmetric h basis (diagonals E_aa, then E_ab + E_ba for a < b); fermion
  /// (1/2) x^T K x over the antisymmetric basis (E_ab - E_ba for a < b).
  MatC quadratic_exponent(const Vec& coords) const {
    MatC q = MatC::Zero(dim_, dim_);
    int tn = 2 * n_;
    int idx = 0;
    if (kind_ == Kind::Boson) {
      require(coords.size() == n_ * (2 * n_ + 1), ErrorKind::Input, "boson oracle coords length");
      for (int a = 0; a < tn; ++a, ++idx)
        if (coords(idx) != 0.0) q += coords(idx) * 0.5 * I * (x_[a] * x_[a]);
      for (int a = 0; a < tn; ++a)
        for (int b = a + 1; b < tn; ++b, ++idx)
          if (coords(idx) != 0.0) q += coords(idx) * 0.5 * I * (x_[a] * x_[b] + x_[b] * x_[a]);
    } else {
      require(coords.size() == n_ * (2 * n_ - 1), ErrorKind::Input, "fermion oracle coords length");
      for (int a = 0; a < tn; ++a)
        for (int b = a + 1; b < tn; ++b, ++idx)
          if (coords(idx) != 0.0) q += coords(idx) * 0.5 * (x_[a] * x_[b] - x_[b] * x_[a]);
    }
    return q;
  }

  /// Diagonal of V(M) = exp((i/2) M^{ab} H_a H_b) in the occupation basis.
  VecC v_diagonal(const Mat& M) const {
    VecC d(dim_);
    for (int idx = 0; idx < dim_; ++idx) {
      Vec w(n_);
      int t = idx;
      switch (kind_) {
        case Kind::Spin:
          // site-major bits, first site = most significant; sigma3 eigenvalue s
          for (int k = 0; k < n_; ++k) w(k) = ((idx >> (n_ - 1 - k)) & 1) ? -1.0 : 1.0;
          // H_a = (i/2) sigma3: exponent -(i/8) s.M.s
          d(idx) = std::exp(-0.125 * I * w.dot(M * w));
          break;
        case Kind::Boson:
          for (int k = n_ - 1; k >= 0; --k) {
            w(k) = t % (cutoff_ + 1) + 0.5;
            t /= cutoff_ + 1;
          }
          d(idx) = std::exp(-0.5 * I * w.dot(M * w));
          break;
        case Kind::Fermion:
          for (int k = 0; k < n_; ++k) w(k) = ((idx >> (n_ - 1 - k)) & 1) ? 0.5 : -0.5;
          d(idx) = std::exp(-0.5 * I * w.dot(M * w));
          break;
      }
    }
    return d;
  }

  VecC reference() const {
    VecC psi = VecC::Zero(dim_);
    psi(kind_ == Kind::Spin ? dim_ - 1 : 0) = 1.0;  // |down..down> or Fock vacuum
    return psi;
  }

 private:
  void build_spin() {
    pauli_[0] = (Mat2C() << 0, 1, 1, 0).finished();
    pauli_[1] = (Mat2C() << 0, cplx(0, -1), cplx(0, 1), 0).finished();
    pauli_[2] = (Mat2C() << 1, 0, 0, -1).finished();
    auto site_op = [&](const Mat2C& m, int k) {
      MatC out = MatC::Identity(1, 1);
      for (int j = 0; j < n_; ++j) out = kron(out, j == k ? MatC(m) : MatC(Mat2C::Identity()));
      return out;
    };
    for (int k = 0; k < n_; ++k) {
      ops_["sx[" + std::to_string(k) + "]"] = site_op(pauli_[0], k);
      ops_["sy[" + std::to_string(k) + "]"] = site_op(pauli_[1], k);
      ops_["sz[" + std::to_string(k) + "]"] = site_op(pauli_[2], k);
      ops_["sp[" + std::to_string(k) + "]"] = site_op((pauli_[0] + I * pauli_[1]) / 2.0, k);
      ops_["sm[" + std::to_string(k) + "]"] = site_op((pauli_[0] - I * pauli_[1]) / 2.0, k);
    }
  }

  void build_boson() {
    MatC a1 = MatC::Zero(cutoff_ + 1, cutoff_ + 1);
    for (int m = 0; m < cutoff_; ++m) a1(m, m + 1) = std::sqrt(double(m + 1));
    auto mode_op = [&](const MatC& m, int k) {
      MatC out = MatC::Identity(1, 1);
      for (int j = 0; j < n_; ++j)
        out = kron(out, j == k ? m : MatC(MatC::Identity(cutoff_ + 1, cutoff_ + 1)));
      return out;
    };
    double r = 1.0 / std::sqrt(2.0);
    x_.resize(2 * n_);
    for (int k = 0; k < n_; ++k) {
      MatC a = mode_op(a1, k), ad = a.adjoint();
      x_[k] = r * (a + ad);
      x_[n_ + k] = I * r * (ad - a);
      ops_["a[" + std::to_string(k) + "]"] = a;
      ops_["adag[" + std::to_string(k) + "]"] = ad;
      ops_["q[" + std::to_string(k) + "]"] = x_[k];
      ops_["p[" + std::to_string(k) + "]"] = x_[n_ + k];
      ops_["n[" + std::to_string(k) + "]"] = ad * a;
    }
  }

  void build_fermion() {
    // Jordan-Wigner with site-major ordering; per-site basis (|0>, |1>), the
    // annihilator maps |1> -> |0> so the Fock vacuum is basis index 0.
    Mat2C sz = (Mat2C() << 1, 0, 0, -1).finished();
    Mat2C ann = (Mat2C() << 0, 1, 0, 0).finished();
    auto jw = [&](int k) {
      MatC out = MatC::Identity(1, 1);
      for (int j = 0; j < n_; ++j) {
        Mat2C m = j < k ? sz : (j == k ? ann : Mat2C::Identity());
        out = kron(out, MatC(m));
      }
      return out;
    };
    double r = 1.0 / std::sqrt(2.0);
    x_.resize(2 * n_);
    for (int k = 0; k < n_; ++k) {
      MatC c = jw(k), cd = c.adjoint();
      x_[k] = r * (cd + c);
      x_[n_ + k] = I * r * (cd - c);
      ops_["c[" + std::to_string(k) + "]"] = c;
      ops_["cdag[" + std::to_string(k) + "]"] = cd;
      ops_["gamma[" + std::to_string(k) + "]"] = x_[k];
      ops_["gammabar[" + std::to_string(k) + "]"] = x_[n_ + k];
      ops_["nf[" + std::to_string(k) + "]"] = cd * c;
    }
  }

  Kind kind_ = Kind::Spin;
  int n_ = 0, dim_ = 0, cutoff_ = 0;
  Mat2C pauli_[3];
  std::vector<MatC> x_;  // quadratures / Majoranas
  std::map<std::string, MatC> ops_;
};

}  // namespace gcs::oracle
