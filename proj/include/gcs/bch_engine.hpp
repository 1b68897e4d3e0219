#pragma once

// Normal-ordered (Gauss) splitting U(g) = T+ T0 T- for an arbitrary AlgebraSpec,
// computed by integrating the coefficient ODEs of the factors along K(t).

#include <functional>

#include "gcs/common.hpp"
#include "gcs/lie_core.hpp"

namespace gcs::bch {

using lie::AlgebraSpec;

/// Coefficients of T+ = exp(sum A_plus^eta E_eta), T0 = exp(A_zero^a H_a),
/// T- = exp(sum A_minus^eta E_{-eta}); eta runs over the positive roots.
struct BchFactors {
  VecC A_plus;
  VecC A_zero;
  VecC A_minus;
};

/// Fundamental-rep product T+ T0 T-.
inline MatC reconstruct(const AlgebraSpec& spec, const BchFactors& f) {
  int np = spec.n_pos();
  VecC xp = VecC::Zero(spec.dim), x0 = VecC::Zero(spec.dim), xm = VecC::Zero(spec.dim);
  xp.segment(spec.rank, np) = f.A_plus;
  x0.head(spec.rank) = f.A_zero;
  xm.tail(np) = f.A_minus;
  MatC Tp = spec.realize_z(spec.basis_change_inv * xp).exp();
  MatC T0 = spec.realize_z(spec.basis_change_inv * x0).exp();
  MatC Tm = spec.realize_z(spec.basis_change_inv * xm).exp();
  return Tp * T0 * Tm;
}

namespace detail {

struct OdeState {
  VecC Ap, A0, Am;
};

/// One evaluation of the factor-coefficient derivatives at fixed (K, dK/dt).
inline OdeState derivative(const AlgebraSpec& spec, const OdeState& st, const VecC& K_ordered,
                           const VecC& Kdot_ordered) {
  int dim = spec.dim, ell = spec.rank, np = spec.n_pos();
  // U^{-1} dU/dt = [(1 - e^{-ad K})/ad K] dK/dt = dexp_factor(-ad K) dK/dt
  MatC adK = spec.ad_ordered(K_ordered);
  VecC w = lie::dexp_factor((-adK).eval()) * Kdot_ordered;

  VecC xm = VecC::Zero(dim);
  xm.tail(np) = st.Am;
  MatC Em = (-spec.ad_ordered(xm)).exp();
  VecC x0 = VecC::Zero(dim);
  x0.head(ell) = st.A0;
  MatC E0 = (-spec.ad_ordered(x0)).exp();

  // M[A0, A-] with column blocks (d_-, d_0, d_+)
  MatC M = MatC::Zero(dim, dim);
  M.block(0, 0, dim, np) = MatC::Identity(dim, dim).block(0, ell + np, dim, np);
  M.block(0, np, dim, ell) = Em.block(0, 0, dim, ell);
  M.block(0, np + ell, dim, np) = Em * E0.block(0, ell, dim, np);

  Eigen::FullPivLU<MatC> lu(M);
  require(lu.isInvertible(), ErrorKind::DecompositionBreakdown,
          "Gauss-decomposition coefficient system is singular");
  VecC d = lu.solve(w);
  VecC dm = d.head(np), d0 = d.segment(np, ell), dp = d.tail(np);

  // d_pm = [(1 - e^{-ad X_pm})/ad X_pm] dA_pm on the nilpotent root subspaces
  VecC xp = VecC::Zero(dim);
  xp.segment(ell, np) = st.Ap;
  MatC Vp = lie::dexp_factor(-spec.ad_ordered(xp)).block(ell, ell, np, np);
  MatC Vm = lie::dexp_factor(-spec.ad_ordered(xm)).block(ell + np, ell + np, np, np);
  OdeState out;
  out.Ap = Vp.partialPivLu().solve(dp);
  out.A0 = d0;
  out.Am = Vm.partialPivLu().solve(dm);
  return out;
}

inline OdeState rk4_step(const AlgebraSpec& spec, const OdeState& st,
                         const std::function<VecC(double)>& K, const std::function<VecC(double)>& Kdot,
                         double t, double dt) {
  auto add = [](const OdeState& a, const OdeState& b, double s) {
    return OdeState{a.Ap + s * b.Ap, a.A0 + s * b.A0, a.Am + s * b.Am};
  };
  OdeState k1 = derivative(spec, st, K(t), Kdot(t));
  OdeState k2 = derivative(spec, add(st, k1, dt / 2), K(t + dt / 2), Kdot(t + dt / 2));
  OdeState k3 = derivative(spec, add(st, k2, dt / 2), K(t + dt / 2), Kdot(t + dt / 2));
  OdeState k4 = derivative(spec, add(st, k3, dt), K(t + dt), Kdot(t + dt));
  OdeState out = st;
  out.Ap += dt / 6 * (k1.Ap + 2 * k2.Ap + 2 * k3.Ap + k4.Ap);
  out.A0 += dt / 6 * (k1.A0 + 2 * k2.A0 + 2 * k3.A0 + k4.A0);
  out.Am += dt / 6 * (k1.Am + 2 * k2.Am + 2 * k3.Am + k4.Am);
  return out;
}

}  // namespace detail

/// One RK4 step of the factor ODE for a time-dependent exponent K(t), starting from
/// factors valid for U(g(t)).
inline BchFactors bch_step(const AlgebraSpec& spec, const BchFactors& factors,
                           const std::function<VecC(double)>& K_ordered,
                           const std::function<VecC(double)>& Kdot_ordered, double t, double dt) {
  detail::OdeState st{factors.A_plus, factors.A_zero, factors.A_minus};
  st = detail::rk4_step(spec, st, K_ordered, Kdot_ordered, t, dt);
  return {st.Ap, st.A0, st.Am};
}

/// Gauss-split exp(K) for a fixed element, integrating K(t) = tK over [0,1] and
/// halving the step until the fundamental-rep reconstruction residual is below tol.
/// K is given in ordered (H,E) coordinates.
inline BchFactors bch_split_generic(const AlgebraSpec& spec, const VecC& K_ordered,
                                    double tol = 1e-8, int initial_steps = 16,
                                    int max_halvings = 8) {
  require(K_ordered.size() == spec.dim, ErrorKind::Input, "bch_split_generic: wrong K length");
  MatC target = spec.realize_z(spec.basis_change_inv * K_ordered).exp();
  auto K = [&](double t) { return (t * K_ordered).eval(); };
  auto Kdot = [&](double) { return K_ordered; };
  int steps = initial_steps;
  for (int attempt = 0; attempt <= max_halvings; ++attempt, steps *= 2) {
    detail::OdeState st{VecC::Zero(spec.n_pos()), VecC::Zero(spec.rank), VecC::Zero(spec.n_pos())};
    double dt = 1.0 / steps;
    for (int i = 0; i < steps; ++i) st = detail::rk4_step(spec, st, K, Kdot, i * dt, dt);
    BchFactors f{st.Ap, st.A0, st.Am};
    double resid = (reconstruct(spec, f) - target).cwiseAbs().maxCoeff();
    if (resid < tol) return f;
  }
  fail(ErrorKind::Integration, "bch_split_generic: step control did not converge");
}

/// Split exp(K) for K given in Z-basis coordinates (real combination of the Z_i).
inline BchFactors bch_split_generic_z(const AlgebraSpec& spec, const Vec& K_z, double tol = 1e-8) {
  return bch_split_generic(spec, spec.basis_change * K_z.cast<cplx>(), tol);
}

}  // namespace gcs::bch
