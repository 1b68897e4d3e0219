#pragma once

// Pipeline-vs-oracle validation sweeps shared by the CLI `validate` subcommand
// and the acceptance suite: random fixtures, exhaustive monomial sets, and the
// maximum deviation between the pushdown pipeline and the dense oracle.

#include <string>
#include <vector>

#include "gcs/common.hpp"
#include "gcs/ed_oracle.hpp"
#include "gcs/family_boson.hpp"
#include "gcs/family_fermion.hpp"
#include "gcs/family_su2.hpp"
#include "gcs/standard_form.hpp"

namespace gcs::validate {

struct Options {
  int fixtures = 10;
  std::uint64_t seed = 1;
  int threads = 1;
  int max_degree = 3;
  double k_scale = 1.0;      // group-coordinate norm bound
  double m_scale = 1.0;      // M entries drawn from [-m_scale, m_scale]
  int degree4_samples = 300; // fermions: random degree-4 monomials per fixture
  double tail_tol = 1e-8;    // bosons: Fock tail-weight bound
};

struct Result {
  double max_deviation = 0.0;
  long comparisons = 0;
};

namespace detail {

inline Vec ball_vec(Rng& rng, int n, double radius) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.uniform(-1.0, 1.0);
  double norm = v.norm();
  if (norm == 0.0) return v;
  return v * (radius * rng.uniform() / norm);
}

inline Mat sym_mat(Rng& rng, int n, double scale) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(-scale, scale);
  return 0.5 * (m + m.transpose());
}

/// All ordered monomials over `ops` with degree 1..max_degree.
inline std::vector<std::vector<OpRef>> all_monomials(const std::vector<OpRef>& ops,
                                                     int max_degree) {
  std::vector<std::vector<OpRef>> out;
  std::vector<std::vector<OpRef>> level = {{}};
  for (int d = 1; d <= max_degree; ++d) {
    std::vector<std::vector<OpRef>> next;
    for (const auto& m : level)
      for (const auto& op : ops) {
        auto nm = m;
        nm.push_back(op);
        next.push_back(std::move(nm));
      }
    out.insert(out.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return out;
}

}  // namespace detail

/// Spin pipeline vs dense oracle over every Pauli monomial up to max_degree.
/// Deviations are absolute.
inline Result validate_spin(int n_sites, const Options& opt) {
  std::vector<OpRef> ops;
  for (int k = 0; k < n_sites; ++k)
    for (const char* nm : {"sx", "sy", "sz"}) ops.push_back({nm, k});
  auto monos = detail::all_monomials(ops, opt.max_degree);
  spin::SpinFamily fam(n_sites);
  auto sys = oracle::DenseSystem::spin(n_sites);
  std::vector<double> devs(opt.fixtures, 0.0);
  parallel_for(opt.fixtures, opt.threads, [&](int f) {
    Rng rng(opt.seed + 977 * std::uint64_t(f));
    Vec k1 = detail::ball_vec(rng, 3 * n_sites, opt.k_scale);
    Vec k2 = detail::ball_vec(rng, 3 * n_sites, opt.k_scale);
    Mat M = detail::sym_mat(rng, n_sites, opt.m_scale);
    auto st = make_state(fam, k1, k2, M);
    Evaluator ev(fam, st, opt.max_degree);
    VecC psi = sys.build_state(k1, k2, M);
    double worst = 0.0;
    for (const auto& mono : monos) {
      OperatorExpr obs;
      obs.add(1.0, mono);
      worst = std::max(worst, std::abs(ev.expect(obs) - sys.expect(psi, obs)));
    }
    devs[f] = worst;
  });
  Result r;
  for (double d : devs) r.max_deviation = std::max(r.max_deviation, d);
  r.comparisons = long(monos.size()) * opt.fixtures;
  return r;
}

/// Boson pipeline vs truncated-Fock oracle over quadrature monomials up to
/// max_degree.  The Fock cutoff is doubled until the tail weight passes.
/// Deviations are relative (absolute for values below one).
inline Result validate_boson(int n_modes, const Options& opt) {
  std::vector<OpRef> ops;
  for (int k = 0; k < n_modes; ++k)
    for (const char* nm : {"q", "p"}) ops.push_back({nm, k});
  auto monos = detail::all_monomials(ops, opt.max_degree);
  boson::BosonFamily fam(n_modes);
  int dim_coords = fam.algebra().dim;
  std::vector<double> devs(opt.fixtures, 0.0);
  parallel_for(opt.fixtures, opt.threads, [&](int f) {
    Rng rng(opt.seed + 977 * std::uint64_t(f));
    Vec k1 = detail::ball_vec(rng, dim_coords, opt.k_scale);
    Vec k2 = detail::ball_vec(rng, dim_coords, opt.k_scale);
    Mat M = detail::sym_mat(rng, n_modes, opt.m_scale);
    auto st = make_state(fam, k1, k2, M);
    Evaluator ev(fam, st, opt.max_degree);
    VecC psi;
    int cutoff = 10;
    oracle::DenseSystem sys = oracle::DenseSystem::boson(n_modes, cutoff);
    for (;;) {
      try {
        psi = sys.build_state(k1, k2, M, opt.tail_tol);
        break;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Cutoff) throw;
        cutoff *= 2;
        sys = oracle::DenseSystem::boson(n_modes, cutoff);
      }
    }
    double worst = 0.0;
    for (const auto& mono : monos) {
      OperatorExpr obs;
      obs.add(1.0, mono);
      cplx a = sys.expect(psi, obs);
      cplx b = ev.expect(obs);
      worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
    devs[f] = worst;
  });
  Result r;
  for (double d : devs) r.max_deviation = std::max(r.max_deviation, d);
  r.comparisons = long(monos.size()) * opt.fixtures;
  return r;
}

/// Fermion pipeline vs Jordan-Wigner oracle: every Majorana monomial up to
/// degree 3 plus a seeded sample of degree-4 monomials.  Absolute deviations.
inline Result validate_fermion(int n_modes, const Options& opt) {
  std::vector<OpRef> ops;
  for (int k = 0; k < n_modes; ++k)
    for (const char* nm : {"gamma", "gammabar"}) ops.push_back({nm, k});
  auto monos = detail::all_monomials(ops, std::min(opt.max_degree, 3));
  fermion::FermionFamily fam(n_modes);
  auto sys = oracle::DenseSystem::fermion(n_modes);
  int dim_coords = fam.algebra().dim;
  std::vector<double> devs(opt.fixtures, 0.0);
  long extra = 0;
  if (opt.max_degree >= 4) extra = opt.degree4_samples;
  parallel_for(opt.fixtures, opt.threads, [&](int f) {
    Rng rng(opt.seed + 977 * std::uint64_t(f));
    Vec k1 = detail::ball_vec(rng, dim_coords, opt.k_scale);
    Vec k2 = detail::ball_vec(rng, dim_coords, opt.k_scale);
    Mat M = detail::sym_mat(rng, n_modes, opt.m_scale);
    auto st = make_state(fam, k1, k2, M);
    Evaluator ev(fam, st, std::max(opt.max_degree, 4));
    VecC psi = sys.build_state(k1, k2, M);
    double worst = 0.0;
    auto check = [&](const std::vector<OpRef>& mono) {
      OperatorExpr obs;
      obs.add(1.0, mono);
      worst = std::max(worst, std::abs(ev.expect(obs) - sys.expect(psi, obs)));
    };
    for (const auto& mono : monos) check(mono);
    if (opt.max_degree >= 4) {
      for (int s = 0; s < opt.degree4_samples; ++s) {
        std::vector<OpRef> mono;
        for (int p = 0; p < 4; ++p) mono.push_back(ops[rng.below(ops.size())]);
        check(mono);
      }
    }
    devs[f] = worst;
  });
  Result r;
  for (double d : devs) r.max_deviation = std::max(r.max_deviation, d);
  r.comparisons = (long(monos.size()) + extra) * opt.fixtures;
  return r;
}

inline Result run(oracle::Kind kind, int n, const Options& opt) {
  switch (kind) {
    case oracle::Kind::Spin: return validate_spin(n, opt);
    case oracle::Kind::Boson: return validate_boson(n, opt);
    case oracle::Kind::Fermion: return validate_fermion(n, opt);
  }
  fail(ErrorKind::Input, "unknown system kind");
}

}  // namespace gcs::validate
