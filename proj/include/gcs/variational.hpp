#pragma once

// Tangent-vector machinery and variational evolution on the generalized
// coherent-state manifold: energy, gradient, Gram matrix, imaginary-time
// ground-state search and real-time dynamics.
//
// Parameter layout: [group-1 directions][upper triangle of M, row-major,
// diagonal included][group-2 directions].  Group coordinates are local
// exponential charts around the current elements, g <- g exp(dx . Z).

#include <cmath>
#include <vector>

#include "gcs/common.hpp"
#include "gcs/lie_core.hpp"
#include "gcs/standard_form.hpp"

namespace gcs::var {

enum class Mode { Imaginary, Real };

struct TrajectoryRecord {
  int step = 0;
  double time = 0.0;
  double energy = 0.0;
  double gram_condition = 0.0;
  Vec params;  // cumulative chart displacement (group parts) and current M triangle
};

struct EvolveOptions {
  Mode mode = Mode::Imaginary;
  double dt = 0.01;
  int steps = 100;
  bool freeze_M = false;
  double gram_cutoff = 1e-10;       // relative spectral cutoff of the Gram pseudo-inverse
  double monotone_tol = 1e-9;       // allowed energy increase per imaginary-time step
  int max_step_halvings = 8;
};

template <class F>
class Variational {
 public:
  Variational(const F& fam, GenState<F> state, const OperatorExpr& H, bool freeze_M = false)
      : fam_(fam), state_(std::move(state)), freeze_M_(freeze_M) {
    require(is_hermitian(H), ErrorKind::Input, "variational: Hamiltonian must be Hermitian");
    h_user_ = H;
    h_ = expand(fam_, H);
    n_group_ = fam_.n_group_params();
    ell_ = fam_.rank();
    n_m_ = freeze_M_ ? 0 : ell_ * (ell_ + 1) / 2;
    build_tangents();
  }

  int n_params() const { return 2 * n_group_ + n_m_; }
  const GenState<F>& state() const { return state_; }

  double energy() const { return energy_at(state_); }

  double energy_at(const GenState<F>& st) const {
    Evaluator<F> ev(fam_, st, max_degree_);
    cplx e = ev.expect_expr(h_);
    require(std::abs(e.imag()) < 1e-9, ErrorKind::Input,
            "energy: imaginary residue above tolerance");
    return e.real();
  }

  /// Raw variational quantities: gram(mu,nu) = <V_mu|V_nu>,
  /// grad(mu) = <V_mu|H|psi>, overlap(mu) = <V_mu|psi>.
  void gram_and_gradient(MatC& gram, VecC& grad, VecC& overlap) const {
    gram_and_gradient_at(state_, identity_mix(), gram, grad, overlap);
  }

  std::vector<TrajectoryRecord> evolve(const EvolveOptions& opt) {
    std::vector<TrajectoryRecord> traj;
    int P = n_params();
    Vec cumulative = Vec::Zero(P);
    double t = 0.0;
    double last_energy = energy();
    for (int step = 0; step < opt.steps; ++step) {
      double dt = opt.dt;
      GenState<F> next = state_;
      double next_energy = last_energy;
      Vec dx_total = Vec::Zero(P);
      int halvings = 0;
      double cond = 0.0;
      for (;; ++halvings) {
        require(halvings <= opt.max_step_halvings, ErrorKind::Integration,
                "evolve: step control failed to keep energy monotone");
        Vec k1 = velocity(state_, Vec::Zero(P), opt, &cond);
        Vec k2 = velocity(state_, (0.5 * dt * k1).eval(), opt, nullptr);
        Vec k3 = velocity(state_, (0.5 * dt * k2).eval(), opt, nullptr);
        Vec k4 = velocity(state_, (dt * k3).eval(), opt, nullptr);
        dx_total = dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        next = apply_chart(state_, dx_total);
        next_energy = energy_at(next);
        if (opt.mode == Mode::Real || next_energy <= last_energy + opt.monotone_tol) break;
        dt /= 2.0;
      }
      TrajectoryRecord rec;
      rec.step = step;
      rec.time = t;
      rec.energy = last_energy;
      rec.gram_condition = cond;
      rec.params = cumulative;
      traj.push_back(rec);
      state_ = next;
      cumulative += dx_total;
      last_energy = next_energy;
      t += dt;
    }
    TrajectoryRecord fin;
    fin.step = opt.steps;
    fin.time = t;
    fin.energy = last_energy;
    fin.gram_condition = traj.empty() ? 0.0 : traj.back().gram_condition;
    fin.params = cumulative;
    traj.push_back(fin);
    return traj;
  }

  /// State displaced along the local chart.
  GenState<F> apply_chart(const GenState<F>& st, const Vec& dx) const {
    GenState<F> out = st;
    out.g1 = fam_.mul(st.g1, fam_.group_from_coords(dx.head(n_group_)));
    if (!freeze_M_) {
      int idx = n_group_;
      for (int a = 0; a < ell_; ++a)
        for (int b = a; b < ell_; ++b, ++idx) {
          out.M(a, b) += dx(idx);
          if (a != b) out.M(b, a) += dx(idx);
        }
    }
    out.g2 = fam_.mul(st.g2, fam_.group_from_coords(dx.tail(n_group_)));
    out.has_coords = false;
    return out;
  }

 private:
  struct Tangent {
    int slot;  // 1: between U1 and V, 2: between V and U2, 3: right of U2
    Expr expr;
  };

  void build_tangents() {
    tangents_.clear();
    for (int i = 0; i < n_group_; ++i) tangents_.push_back({1, fam_.group_tangent_op(i)});
    if (!freeze_M_) {
      for (int a = 0; a < ell_; ++a)
        for (int b = a; b < ell_; ++b) {
          Expr e = fam_.cartan_pair_op(a, b);
          cplx scale = (a == b) ? 0.5 * I : I;
          for (auto& m : e) m.coeff *= scale;
          tangents_.push_back({2, std::move(e)});
        }
    }
    for (int i = 0; i < n_group_; ++i) tangents_.push_back({3, fam_.group_tangent_op(i)});
  }

  Mat identity_mix() const { return Mat::Identity(n_group_, n_group_); }

  /// Tangent expr of parameter mu at a chart offset, with the slot-1/slot-3
  /// exprs mixed by the dexp correction of that offset.
  Expr mixed_tangent(int mu, const Mat& W1, const Mat& W3) const {
    const Tangent& tg = tangents_[mu];
    if (tg.slot == 2) return tg.expr;
    const Mat& W = tg.slot == 1 ? W1 : W3;
    int i = tg.slot == 1 ? mu : mu - n_group_ - n_m_;
    Expr out;
    for (int j = 0; j < n_group_; ++j) {
      if (std::abs(W(j, i)) < 1e-15) continue;
      Expr base = fam_.group_tangent_op(j);
      for (auto& m : base) {
        m.coeff *= W(j, i);
        out.push_back(m);
      }
    }
    return out;
  }

  void gram_and_gradient_at(const GenState<F>& st, const Mat& W, MatC& gram, VecC& grad,
                            VecC& overlap) const {
    gram_and_gradient_mixed(st, W, W, gram, grad, overlap);
  }

  void gram_and_gradient_mixed(const GenState<F>& st, const Mat& W1, const Mat& W3, MatC& gram,
                               VecC& grad, VecC& overlap) const {
    int P = n_params();
    Evaluator<F> ev(fam_, st, max_degree_);
    Expr one = {{1.0, {}}};
    gram.resize(P, P);
    grad.resize(P);
    overlap.resize(P);
    std::vector<Expr> texpr(P);
    for (int mu = 0; mu < P; ++mu) texpr[mu] = mixed_tangent(mu, W1, W3);
    auto slotted = [&](int mu, bool bra, const Expr& mid,
                       int nu) -> cplx {  // nu < 0: no ket insertion
      Expr b[4] = {one, one, one, one};   // slots 3,2,1 bra
      Expr a[4] = {one, one, one, one};
      if (bra) b[tangents_[mu].slot] = texpr[mu];
      if (nu >= 0) a[tangents_[nu].slot] = texpr[nu];
      return ev.sandwich(b[3], b[2], b[1], mid, a[1], a[2], a[3]);
    };
    for (int mu = 0; mu < P; ++mu) {
      grad(mu) = slotted(mu, true, h_, -1);
      overlap(mu) = slotted(mu, true, one, -1);
      for (int nu = 0; nu < P; ++nu) gram(mu, nu) = slotted(mu, true, one, nu);
    }
    double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
    require((gram - gram.adjoint()).cwiseAbs().maxCoeff() < 1e-9 * scale, ErrorKind::Input,
            "gram matrix is not Hermitian");
  }

  /// TDVP velocity at a chart offset dx from the current state.
  Vec velocity(const GenState<F>& base, const Vec& dx, const EvolveOptions& opt,
               double* cond_out) const {
    GenState<F> st = apply_chart(base, dx);
    Mat W1 = chart_correction(dx.head(n_group_));
    Mat W3 = chart_correction(dx.tail(n_group_));
    MatC gram;
    VecC grad, overlap;
    gram_and_gradient_mixed(st, W1, W3, gram, grad, overlap);
    cplx eval = Evaluator<F>(fam_, st, max_degree_).expect_expr(h_);
    double E = eval.real();
    int P = n_params();
    // connected quantities project out the global-phase/norm gauge directions
    MatC gconn = gram - overlap * overlap.adjoint();
    VecC gradc = grad - E * overlap;
    Mat A = gconn.real();
    A = 0.5 * (A + A.transpose()).eval();
    Vec rhs(P);
    for (int mu = 0; mu < P; ++mu)
      rhs(mu) = opt.mode == Mode::Imaginary ? -gradc(mu).real() : gradc(mu).imag();
    Eigen::SelfAdjointEigenSolver<Mat> es(A);
    double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
    require(lmax > 1e-14, ErrorKind::StalledManifold,
            "evolve: Gram matrix has effectively rank zero");
    if (cond_out) {
      double lmin_pos = lmax;
      for (int i = 0; i < P; ++i)
        if (es.eigenvalues()(i) > opt.gram_cutoff * lmax)
          lmin_pos = std::min(lmin_pos, es.eigenvalues()(i));
      *cond_out = lmax / lmin_pos;
    }
    Vec x = Vec::Zero(P);
    Vec proj = es.eigenvectors().transpose() * rhs;
    for (int i = 0; i < P; ++i)
      if (es.eigenvalues()(i) > opt.gram_cutoff * lmax) x += proj(i) / es.eigenvalues()(i) *
                                                             es.eigenvectors().col(i);
    return x;
  }

  /// dexp correction of the exponential chart at offset k:
  /// d/dt exp(K(t)) = exp(K) [(1 - e^{-ad K})/ad K] dK/dt.
  Mat chart_correction(const Vec& k) const {
    if (k.cwiseAbs().maxCoeff() == 0.0) return identity_mix();
    const lie::AlgebraSpec& spec = fam_.algebra();
    Mat bracket_action = lie::ad_matrix(spec, k).transpose();
    MatC W = lie::dexp_factor((-bracket_action).cast<cplx>().eval());
    return W.real();
  }

  const F& fam_;
  GenState<F> state_;
  bool freeze_M_;
  OperatorExpr h_user_;
  Expr h_;
  std::vector<Tangent> tangents_;
  int n_group_ = 0, ell_ = 0, n_m_ = 0;
  int max_degree_ = 12;
};

}  // namespace gcs::var
