#include <catch2/catch_amalgamated.hpp>

#include <unsupported/Eigen/MatrixFunctions>

#include "gcs/ed_oracle.hpp"
#include "gcs/family_fermion.hpp"

using namespace gcs;
using namespace gcs::fermion;

namespace {
Vec random_vec(Rng& rng, int n, double s) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.uniform(-s, s);
  return v;
}
}  // namespace

TEST_CASE("cartan_decompose_f: identity, small elements, reconstruction") {
  auto id = cartan_decompose_f(Mat::Identity(4, 4));
  CHECK((id.T - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(std::abs(id.theta) < 1e-13);

  Rng rng(3);
  FermionFamily fam(4);  // so(8)
  Vec k = random_vec(rng, fam.algebra().dim, 0.1);
  Mat G = fam.group_from_coords(k);
  auto cf = cartan_decompose_f(G);
  Mat om = omega(4);
  CHECK((om * cf.T - cf.T.inverse() * om).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((cf.u * om * cf.u.transpose() - om).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((cf.u.inverse() * cf.T - G).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("a_plus_from_G: trivial case and r0 against the dense oracle") {
  auto gid = a_plus_from_G(Mat::Identity(4, 4));
  CHECK(gid.A_plus.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(std::abs(gid.r0 - 1.0) < 1e-13);

  Rng rng(5);
  for (int n_modes : {2, 3, 4}) {
    FermionFamily fam(n_modes);
    auto sys = oracle::DenseSystem::fermion(n_modes);
    Vec k = random_vec(rng, fam.algebra().dim, 0.35);
    Mat G = fam.group_from_coords(k);
    auto g = a_plus_from_G(G);
    CHECK((g.A_plus + g.A_plus.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    VecC psi = sys.build_state(Vec::Zero(k.size()), k, Mat::Zero(n_modes, n_modes));
    CHECK(std::abs(psi(0) - g.r0) < 1e-10);
  }
}

TEST_CASE("two-mode pair rotation matches the 4-dim oracle") {
  // G = exp(K) with a single (0,1) pairing angle: the gamma-gamma + gbar-gbar
  // antisymmetric generator
  FermionFamily fam(2);
  auto sys = oracle::DenseSystem::fermion(2);
  double th = 0.6;
  // coords basis: (E_ab - E_ba) lexicographic over 4x4: pairs
  // (0,1),(0,2),(0,3),(1,2),(1,3),(2,3)
  Vec k = Vec::Zero(6);
  k(0) = th;   // gamma_0 gamma_1 block
  k(5) = th;   // gbar_0 gbar_1 block
  Mat G = fam.group_from_coords(k);
  auto g = a_plus_from_G(G);
  VecC psi = sys.build_state(Vec::Zero(6), k, Mat::Zero(2, 2));
  CHECK(std::abs(psi(0) - g.r0) < 1e-10);
  // A+ is a pure (0,1) pairing amplitude of tan type: check against the
  // state-vector ratio <11|psi>/<00|psi> = 2 (A+)_{01}
  cplx ratio = psi(3) / psi(0);
  CHECK(std::abs(2.0 * g.A_plus(0, 1) - ratio) < 1e-10);
}

TEST_CASE("fermion R matrix pushthrough on the dense oracle") {
  auto sys = oracle::DenseSystem::fermion(2);
  MatC A(2, 2);
  A << 0.0, cplx(0.21, -0.13), cplx(-0.21, 0.13), 0.0;
  MatC tm = MatC::Zero(sys.dim(), sys.dim());
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      tm += std::conj(A(k, l)) * sys.op_matrix({"c", k}) * sys.op_matrix({"c", l});
  MatC texp = tm.exp();
  MatC Rm = r_matrix_fermion(A);
  const char* names[4] = {"gamma", "gamma", "gammabar", "gammabar"};
  int idx[4] = {0, 1, 0, 1};
  for (int i = 0; i < 4; ++i) {
    MatC lhs = texp * sys.op_matrix({names[i], idx[i]});
    MatC rhs = MatC::Zero(sys.dim(), sys.dim());
    for (int j = 0; j < 4; ++j) rhs += Rm(i, j) * sys.op_matrix({names[j], idx[j]});
    rhs = rhs * texp;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("fermionic wick moments") {
  CHECK(wick_moments_f({0}, 2) == cplx(0.0));
  // <0| gamma_0 gbar_0 |0> = i/2
  CHECK(std::abs(wick_moments_f({0, 2}, 2) - I * 0.5) < 1e-15);
  // degree-4 Majorana moment against the dense oracle
  auto sys = oracle::DenseSystem::fermion(2);
  VecC vac = sys.reference();
  OperatorExpr mono;
  mono.add(1.0, {{"gamma", 0}, {"gammabar", 1}, {"gammabar", 0}, {"gamma", 1}});
  // index map: gamma_k = k, gammabar_k = N + k
  cplx viaw = wick_moments_f({0, 3, 2, 1}, 2);
  CHECK(std::abs(sys.expect(vac, mono) - viaw) < 1e-14);
}

TEST_CASE("conjugated-Cartan amplitude vs the dense oracle") {
  Rng rng(9);
  FermionFamily fam(3);
  auto sys = oracle::DenseSystem::fermion(3);
  Vec k = random_vec(rng, fam.algebra().dim, 0.3);
  Mat G2 = fam.group_from_coords(k);
  MatC Z2 = pair_matrix_f(G2);
  Vec c(3);
  c << 2.9, -0.7, 4.0;  // large angles on purpose
  cplx amp = conjugated_cartan_amplitude_f(Z2, c);
  VecC chi = sys.build_state(Vec::Zero(k.size()), k, Mat::Zero(3, 3));
  VecC phases(sys.dim());
  for (int idx = 0; idx < sys.dim(); ++idx) {
    double acc = 0;
    for (int m = 0; m < 3; ++m) acc += c(m) * (((idx >> (3 - 1 - m)) & 1) ? 0.5 : -0.5);
    phases(idx) = std::exp(I * acc);
  }
  cplx dense = chi.dot(phases.cwiseProduct(chi));
  CHECK(std::abs(amp - dense) < 1e-11);
}
