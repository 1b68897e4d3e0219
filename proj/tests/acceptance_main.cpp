// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Every tolerance is pinned here, in code.

#include <chrono>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "gcs/bch_engine.hpp"
#include "gcs/ed_oracle.hpp"
#include "gcs/family_boson.hpp"
#include "gcs/family_fermion.hpp"
#include "gcs/family_su2.hpp"
#include "gcs/standard_form.hpp"
#include "gcs/validate.hpp"
#include "gcs/variational.hpp"

using namespace gcs;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("CRITERION %d: %s  (%s)\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int hw_threads() { return std::max(1u, std::min(4u, std::thread::hardware_concurrency())); }

Vec ball(Rng& rng, int n, double r) { return validate::detail::ball_vec(rng, n, r); }
Mat sym(Rng& rng, int n, double s) { return validate::detail::sym_mat(rng, n, s); }

// ---- criterion 1: spin pipeline equivalence ------------------------------
void criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  validate::Options opt;
  opt.fixtures = 50;
  opt.seed = 20260801;
  opt.threads = hw_threads();
  opt.max_degree = 3;
  opt.k_scale = 1.0;
  opt.m_scale = 1.0;
  auto res = validate::validate_spin(3, opt);
  double dt = seconds_since(t0);
  bool pass = res.max_deviation < 1e-10 && dt < 10.0;
  char buf[160];
  std::snprintf(buf, sizeof buf, "N=3, %d fixtures, %ld comparisons, max |dev| = %.3e, %.2f s",
                opt.fixtures, res.comparisons, res.max_deviation, dt);
  report(1, pass, buf);
}

// ---- criterion 2: boson pipeline equivalence -----------------------------
void criterion2() {
  auto t0 = std::chrono::steady_clock::now();
  validate::Options opt;
  opt.fixtures = 20;
  opt.seed = 20260802;
  opt.threads = hw_threads();
  opt.max_degree = 4;
  opt.k_scale = 0.3;
  opt.m_scale = 1.0;
  opt.tail_tol = 1e-12;  // well inside the 1e-8 bound; keeps oracle truncation
                         // error out of the 1e-6 comparison
  auto res = validate::validate_boson(2, opt);
  double dt = seconds_since(t0);
  bool pass = res.max_deviation < 1e-6 && dt < 60.0;
  char buf[160];
  std::snprintf(buf, sizeof buf, "N=2, %d fixtures, %ld comparisons, max rel dev = %.3e, %.2f s",
                opt.fixtures, res.comparisons, res.max_deviation, dt);
  report(2, pass, buf);
}

// ---- criterion 3: fermion pipeline equivalence ---------------------------
void criterion3() {
  auto t0 = std::chrono::steady_clock::now();
  validate::Options opt;
  opt.fixtures = 20;
  opt.seed = 20260803;
  opt.threads = hw_threads();
  opt.max_degree = 4;  // exhaustive through degree 3 plus sampled degree 4
  opt.k_scale = 0.8;
  opt.m_scale = 1.0;
  opt.degree4_samples = 300;
  auto res = validate::validate_fermion(4, opt);
  double dt = seconds_since(t0);
  bool pass = res.max_deviation < 1e-10 && dt < 10.0;
  char buf[160];
  std::snprintf(buf, sizeof buf, "N=4, %d fixtures, %ld comparisons, max |dev| = %.3e, %.2f s",
                opt.fixtures, res.comparisons, res.max_deviation, dt);
  report(3, pass, buf);
}

// ---- criterion 4: BCH reconstruction and cross-method agreement ----------

// Ladder-basis defining matrices of the three analytic boson factors.
// [a, X0] = 2 A0 a and [adag, X0] = -2 A0^T adag give the middle blocks;
// T+/T- are unipotent.  The product reconstructs the Cartan factor U(T).
MatC boson_ladder_product(const boson::GaussData& g, int n) {
  MatC Bp = MatC::Zero(2 * n, 2 * n), Bm = MatC::Zero(2 * n, 2 * n);
  Bp.topRightCorner(n, n) = 2.0 * g.A_plus;
  Bm.bottomLeftCorner(n, n) = 2.0 * g.A_plus.conjugate();
  MatC two = (2.0 * g.A_zero).eval();
  MatC mtwot = (-2.0 * g.A_zero.transpose()).eval();
  MatC mid = MatC::Zero(2 * n, 2 * n);
  mid.topLeftCorner(n, n) = two.exp().eval();
  mid.bottomRightCorner(n, n) = mtwot.exp().eval();
  return (MatC::Identity(2 * n, 2 * n) + Bp) * mid * (MatC::Identity(2 * n, 2 * n) + Bm);
}

void criterion4() {
  Rng rng(20260804);
  double worst_recon = 0.0, worst_cross = 0.0;
  bool ok = true;
  std::string note;

  // su(2): analytic matrix split, 100 elements; ODE coefficients on a subset
  auto su2 = lie::make_su2();
  for (int trial = 0; trial < 100; ++trial) {
    Vec k = ball(rng, 3, 1.2);
    Mat2C u = spin::su2_exp(k(0), k(1), k(2));
    auto f = spin::gauss_split_matrix(u);
    Mat2C sp = (lie::pauli(0) + I * lie::pauli(1)) / 2.0;
    Mat2C sm = (lie::pauli(0) - I * lie::pauli(1)) / 2.0;
    Mat2C rec = ((f.A_plus * sp).exp() * (f.A_zero / 2.0 * lie::pauli(2)).exp() *
                 (f.A_minus * sm).exp())
                    .eval();
    worst_recon = std::max(worst_recon, (rec - u).cwiseAbs().maxCoeff());
    if (trial < 20) {
      auto g = bch::bch_split_generic_z(su2, k, 1e-10);
      // spec root normalization: E_+ = sigma_+^{std}/sqrt(2)
      double diff = std::abs(g.A_plus(0) / std::sqrt(2.0) - f.A_plus);
      diff = std::max(diff, std::abs(g.A_minus(0) / std::sqrt(2.0) - f.A_minus));
      diff = std::max(diff, std::abs(I * g.A_zero(0) - f.A_zero));  // T0 = exp(A0 H), H = (i/2) s3
      worst_cross = std::max(worst_cross, diff);
    }
  }

  // sp(2N): the analytic tanh-block split reconstructs the Cartan factor U(T)
  // in the ladder-basis defining rep (T+ T0 T- is an identity for U(T); the
  // passive factor u acts on the vacuum as the phase inside r0).  The ODE split
  // of the full element agrees through reconstruction and the vacuum amplitude.
  for (int n : {1, 2}) {
    boson::BosonFamily fam(n);
    auto spec = fam.algebra();
    int trials = n == 1 ? 60 : 40;
    for (int trial = 0; trial < trials; ++trial) {
      Vec k = ball(rng, spec.dim, n == 1 ? 0.6 : 0.4);
      Mat S = fam.group_from_coords(k);
      auto g = boson::a_plus_from_S(S);
      Mat T = boson::cartan_decompose(S).T;
      MatC lhs = boson_ladder_product(g, n);
      MatC rhs = boson::ladder_map(n) * T.cast<cplx>() * boson::ladder_map_inv(n);
      worst_recon = std::max(worst_recon, (lhs - rhs).cwiseAbs().maxCoeff());
      if (trial < 8) {
        auto f = bch::bch_split_generic_z(spec, k, 1e-10);
        double resid =
            (bch::reconstruct(spec, f) - spec.realize_z(k.cast<cplx>()).exp()).cwiseAbs().maxCoeff();
        cplx amp_ode = std::exp(I * (f.A_zero.transpose() * fam.mu().cast<cplx>())(0));
        double diff = std::max(resid, std::abs(amp_ode - g.r0));
        worst_cross = std::max(worst_cross, diff);
      }
    }
  }

  // so(2N): the analytic split reconstructs U(T) densely in the 2^N Fock rep,
  // with T from the Cartan decomposition realized through the Majorana
  // quadratic of log T
  for (int n : {2, 4}) {
    fermion::FermionFamily fam(n);
    auto spec = fam.algebra();
    auto sys = oracle::DenseSystem::fermion(n);
    int trials = n == 2 ? 60 : 40;
    for (int trial = 0; trial < trials; ++trial) {
      Vec k = ball(rng, spec.dim, n == 2 ? 0.6 : 0.4);
      Mat G = fam.group_from_coords(k);
      auto g = fermion::a_plus_from_G(G);
      Mat T = fermion::cartan_decompose_f(G).T;
      MatC ktc = T.cast<cplx>().log();
      require(ktc.imag().cwiseAbs().maxCoeff() < 1e-9, ErrorKind::Branch, "log T not real");
      Mat kt = ktc.real();
      // coordinates of log T on the so(2N) basis (E_ab - E_ba, a < b): entries above
      // the diagonal
      Vec kt_coords(spec.dim);
      {
        int idx = 0;
        for (int a = 0; a < 2 * n; ++a)
          for (int b = a + 1; b < 2 * n; ++b, ++idx) kt_coords(idx) = kt(a, b);
      }
      int D = sys.dim();
      MatC Tp = MatC::Zero(D, D), T0 = MatC::Zero(D, D), Tm = MatC::Zero(D, D);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          if (std::abs(g.A_plus(a, b)) > 1e-16) {
            Tp += g.A_plus(a, b) * sys.op_matrix({"cdag", a}) * sys.op_matrix({"cdag", b});
            Tm += std::conj(g.A_plus(a, b)) * sys.op_matrix({"c", a}) * sys.op_matrix({"c", b});
          }
          T0 += g.A_zero(a, b) * sys.op_matrix({"cdag", a}) * sys.op_matrix({"c", b});
          T0 -= g.A_zero.transpose()(a, b) * sys.op_matrix({"c", a}) * sys.op_matrix({"cdag", b});
        }
      MatC dense = sys.group_unitary(kt_coords);  // U(T) = exp(Q(log T))
      MatC tpe = Tp.exp(), t0e = T0.exp(), tme = Tm.exp();
      MatC rec = tpe * t0e * tme;
      worst_recon = std::max(worst_recon, (rec - dense).cwiseAbs().maxCoeff());
      if (trial < (n == 2 ? 8 : 4)) {
        auto f = bch::bch_split_generic_z(spec, k, 1e-10);
        double resid =
            (bch::reconstruct(spec, f) - spec.realize_z(k.cast<cplx>()).exp()).cwiseAbs().maxCoeff();
        cplx amp_ode = std::exp(I * (f.A_zero.transpose() * fam.mu().cast<cplx>())(0));
        double diff = std::max(resid, std::abs(amp_ode - g.r0));
        worst_cross = std::max(worst_cross, diff);
      }
    }
  }

  ok = worst_recon < 1e-12 && worst_cross < 1e-8;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "analytic reconstruction max = %.3e (tol 1e-12), ODE cross-method max = %.3e (tol 1e-8)",
                worst_recon, worst_cross);
  report(4, ok, buf);
}

// ---- criterion 5: single-mode squeeze closed form -------------------------
void criterion5() {
  double worst = 0.0;
  for (double r : {0.1, 0.5, 1.0}) {
    Mat S(2, 2);
    S << std::exp(r), 0, 0, std::exp(-r);
    auto g = boson::a_plus_from_S(S);
    worst = std::max(worst, std::abs(g.A_plus(0, 0) - 0.5 * std::tanh(r)));
    worst = std::max(worst, std::abs(g.r0 - std::pow(std::cosh(r), -0.5)));
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "r in {0.1,0.5,1.0}: max dev = %.3e (tol 1e-10)", worst);
  report(5, worst < 1e-10, buf);
}

// ---- criterion 6: M = 0 recovers coherent-state expectations --------------
void criterion6() {
  Rng rng(20260806);
  double worst = 0.0;

  {  // spins: direct per-site conjugation evaluator
    int n = 3;
    spin::SpinFamily fam(n);
    for (int trial = 0; trial < 10; ++trial) {
      Vec k1 = ball(rng, 3 * n, 1.0), k2 = ball(rng, 3 * n, 1.0);
      auto st = make_state(fam, k1, k2, Mat::Zero(n, n));
      Evaluator ev(fam, st);
      auto g = fam.mul(fam.group_from_coords(k1), fam.group_from_coords(k2));
      const char* names[3] = {"sx", "sy", "sz"};
      for (int m = 0; m < 12; ++m) {
        int len = 1 + int(rng.below(3));
        OperatorExpr obs;
        std::vector<Mat2C> chain(n, Mat2C::Identity());
        std::vector<OpRef> ops;
        for (int p = 0; p < len; ++p) {
          int i = int(rng.below(3)), k = int(rng.below(n));
          ops.push_back({names[i], k});
          chain[k] = chain[k] * (g[k].adjoint() * lie::pauli(i) * g[k]);
        }
        obs.add(1.0, ops);
        cplx direct = 1.0;
        for (int k = 0; k < n; ++k) direct *= chain[k](1, 1);
        worst = std::max(worst, std::abs(ev.expect(obs) - direct));
      }
    }
  }

  // bosons and fermions: Wick evaluator with the combined transformation
  auto gaussian_direct = [&](bool fermionic, int n, const Mat& S12,
                             const std::vector<int>& idx) {
    MatC G = 0.5 * (MatC::Identity(2 * n, 2 * n) + I * boson::omega(n).cast<cplx>());
    MatC Gt = S12.cast<cplx>() * G * S12.transpose().cast<cplx>();
    MatC P(idx.size(), idx.size());
    for (size_t p = 0; p < idx.size(); ++p)
      for (size_t q = 0; q < idx.size(); ++q) P(p, q) = Gt(idx[p], idx[q]);
    std::vector<int> order(idx.size());
    for (size_t p = 0; p < idx.size(); ++p) order[p] = int(p);
    int pos[16];
    for (size_t p = 0; p < idx.size(); ++p) pos[p] = int(p);
    return boson::pair_over(P, order.data(), pos, int(idx.size()), fermionic);
  };

  {
    int n = 2;
    boson::BosonFamily fam(n);
    const char* names[2] = {"q", "p"};
    for (int trial = 0; trial < 6; ++trial) {
      Vec k1 = ball(rng, fam.algebra().dim, 0.3), k2 = ball(rng, fam.algebra().dim, 0.3);
      auto st = make_state(fam, k1, k2, Mat::Zero(n, n));
      Evaluator ev(fam, st);
      Mat S12 = st.g1 * st.g2;
      for (int m = 0; m < 8; ++m) {
        int len = 2 * (1 + int(rng.below(2)));
        OperatorExpr obs;
        std::vector<OpRef> ops;
        std::vector<int> idx;
        for (int p = 0; p < len; ++p) {
          int i = int(rng.below(2)), k = int(rng.below(n));
          ops.push_back({names[i], k});
          idx.push_back(i * n + k);
        }
        obs.add(1.0, ops);
        worst = std::max(worst, std::abs(ev.expect(obs) - gaussian_direct(false, n, S12, idx)));
      }
    }
  }

  {
    int n = 3;
    fermion::FermionFamily fam(n);
    const char* names[2] = {"gamma", "gammabar"};
    for (int trial = 0; trial < 6; ++trial) {
      Vec k1 = ball(rng, fam.algebra().dim, 0.5), k2 = ball(rng, fam.algebra().dim, 0.5);
      auto st = make_state(fam, k1, k2, Mat::Zero(n, n));
      Evaluator ev(fam, st);
      Mat S12 = st.g1 * st.g2;
      for (int m = 0; m < 8; ++m) {
        int len = 2 * (1 + int(rng.below(2)));
        OperatorExpr obs;
        std::vector<OpRef> ops;
        std::vector<int> idx;
        for (int p = 0; p < len; ++p) {
          int i = int(rng.below(2)), k = int(rng.below(n));
          ops.push_back({names[i], k});
          idx.push_back(i * n + k);
        }
        obs.add(1.0, ops);
        worst = std::max(worst, std::abs(ev.expect(obs) - gaussian_direct(true, n, S12, idx)));
      }
    }
  }

  char buf[120];
  std::snprintf(buf, sizeof buf, "three families, max dev vs coherent evaluator = %.3e (tol 1e-12)",
                worst);
  report(6, worst < 1e-12, buf);
}

// ---- criterion 7: entangling correlator -----------------------------------
void criterion7() {
  spin::SpinFamily fam(2);
  Vec k2(6);
  k2 << 0, M_PI / 4, 0, 0, M_PI / 4, 0;  // both spins along +x
  Mat M = Mat::Zero(2, 2);
  M(0, 1) = M(1, 0) = M_PI / 2;
  OperatorExpr xx, x0, x1;
  xx.add(1.0, {{"sx", 0}, {"sx", 1}});
  x0.add(1.0, {{"sx", 0}});
  x1.add(1.0, {{"sx", 1}});
  auto conn_at = [&](const Mat& m) {
    auto st = make_state(fam, Vec::Zero(6), k2, m);
    Evaluator ev(fam, st);
    return ev.expect(xx) - ev.expect(x0) * ev.expect(x1);
  };
  cplx conn = conn_at(M);
  cplx conn0 = conn_at(Mat::Zero(2, 2));
  // dense-oracle target frozen before the build: connected <sx sx> = 1/2
  bool pass = std::abs(conn) > 0.1 && std::abs(conn - cplx(0.5)) < 1e-10 && std::abs(conn0) < 1e-14;
  char buf[140];
  std::snprintf(buf, sizeof buf, "connected corr = %.12f (target 0.5), M=0 value = %.1e", conn.real(),
                std::abs(conn0));
  report(7, pass, buf);
}

// ---- criterion 8: variational checks ---------------------------------------
void criterion8() {
  Rng rng(20260808);
  int n = 2;
  spin::SpinFamily fam(n);
  auto sys = oracle::DenseSystem::spin(n);
  OperatorExpr H;
  H.add(-1.0, {{"sz", 0}, {"sz", 1}});
  H.add(-0.9, {{"sx", 0}});
  H.add(-0.9, {{"sx", 1}});

  // gradient vs central finite differences
  double worst_fd = 0.0;
  {
    Vec k1 = ball(rng, 6, 0.5), k2 = ball(rng, 6, 0.5);
    Mat M = sym(rng, n, 0.7);
    auto st = make_state(fam, k1, k2, M);
    var::Variational var(fam, st, H);
    MatC gram;
    VecC grad, overlap;
    var.gram_and_gradient(gram, grad, overlap);
    double eps = 1e-5;
    for (int mu = 0; mu < var.n_params(); ++mu) {
      Vec e = Vec::Zero(var.n_params());
      e(mu) = eps;
      double fd = (var.energy_at(var.apply_chart(st, e)) -
                   var.energy_at(var.apply_chart(st, (-e).eval()))) /
                  (2 * eps);
      double an = 2.0 * grad(mu).real();
      worst_fd = std::max(worst_fd, std::abs(fd - an) / std::max(1.0, std::abs(an)));
    }
  }

  // imaginary time: exact lower bound, mean-field upper bound, nesting
  double e_exact = sys.ground_energy(H);
  var::EvolveOptions opt;
  opt.mode = var::Mode::Imaginary;
  opt.dt = 0.08;
  opt.steps = 220;
  Vec k1 = ball(rng, 6, 0.3), k2 = ball(rng, 6, 0.3);
  var::Variational mf(fam, make_state(fam, k1, k2, Mat::Zero(n, n)), H, true);
  double e_mf = mf.evolve(opt).back().energy;
  var::Variational full(fam, make_state(fam, k1, k2, sym(rng, n, 0.2)), H, false);
  double e_full = full.evolve(opt).back().energy;

  bool pass = worst_fd < 1e-5 && e_full >= e_exact - 1e-9 && e_full <= e_mf + 1e-9;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "FD grad rel dev = %.2e (tol 1e-5); E_exact = %.9f <= E = %.9f <= E_meanfield = %.9f",
                worst_fd, e_exact, e_full, e_mf);
  report(8, pass, buf);
}

// ---- criterion 9: sigma3 transparency --------------------------------------
void criterion9() {
  Rng rng(20260809);
  int n = 3;
  spin::SpinFamily fam(n);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    Vec k2 = ball(rng, 3 * n, 1.0);
    Mat M = sym(rng, n, 1.0);
    auto st = make_state(fam, Vec::Zero(3 * n), k2, M);
    auto st0 = make_state(fam, Vec::Zero(3 * n), k2, Mat::Zero(n, n));
    Evaluator ev(fam, st), ev0(fam, st0);
    std::vector<std::vector<OpRef>> monos = {
        {{"sz", 0}}, {{"sz", 1}, {"sz", 2}}, {{"sz", 0}, {"sz", 1}, {"sz", 2}},
        {{"sz", 2}, {"sz", 2}}};
    for (const auto& ops : monos) {
      OperatorExpr obs;
      obs.add(1.0, ops);
      worst = std::max(worst, std::abs(ev.expect(obs) - ev0.expect(obs)));
    }
  }
  char buf[140];
  std::snprintf(buf, sizeof buf,
                "sigma3-only observables, g1 = id: max |<O>_M - <O>_0| = %.3e (tol 1e-12)", worst);
  report(9, worst < 1e-12, buf);
}

}  // namespace

int main() {
  std::printf("acceptance suite (threads: %d)\n", hw_threads());
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  if (failures == 0)
    std::printf("all criteria passed\n");
  else
    std::printf("%d criteria FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
