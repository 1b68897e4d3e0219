// gcs: command-line front end.  Subcommands:
//   expect    per-observable expectation values on one generalized state
//   evolve    imaginary- or real-time variational evolution
//   bch       Gauss (normal-ordered) splitting of one group element
//   validate  pipeline-vs-dense-oracle sweep on the configured system
//
// One structured config document drives a run; identical config + seed gives
// byte-identical result files.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gcs/bch_engine.hpp"
#include "gcs/ed_oracle.hpp"
#include "gcs/family_boson.hpp"
#include "gcs/family_fermion.hpp"
#include "gcs/family_su2.hpp"
#include "gcs/standard_form.hpp"
#include "gcs/validate.hpp"
#include "gcs/variational.hpp"
#include "gcs/version.hpp"

using nlohmann::json;
using namespace gcs;

namespace {

std::string fmt(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_cplx(cplx z) { return "[" + fmt(z.real()) + ", " + fmt(z.imag()) + "]"; }

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

struct Config {
  json doc;
  std::string raw;
  std::uint64_t hash = 0;

  static Config load(const std::string& path) {
    std::ifstream in(path);
    require(bool(in), ErrorKind::Config, "cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    Config cfg;
    cfg.raw = ss.str();
    try {
      cfg.doc = json::parse(cfg.raw);
    } catch (const json::parse_error& e) {
      fail(ErrorKind::Parse, std::string("config is not valid JSON: ") + e.what());
    }
    cfg.hash = fnv1a64(cfg.raw);
    return cfg;
  }
};

template <class T>
T field(const json& j, const std::string& key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, "field '" + key + "': " + e.what());
  }
}

template <class T>
T need(const json& j, const std::string& key, const std::string& where) {
  require(j.contains(key), ErrorKind::Config, "missing field '" + key + "' in " + where);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, "field '" + key + "' in " + where + ": " + e.what());
  }
}

Vec to_vec(const json& arr, const std::string& where) {
  require(arr.is_array(), ErrorKind::Config, where + " must be an array");
  Vec v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) {
    require(arr[i].is_number(), ErrorKind::Config, where + " must hold numbers");
    v(i) = arr[i].get<double>();
  }
  return v;
}

Mat to_mat(const json& arr, const std::string& where) {
  require(arr.is_array() && !arr.empty(), ErrorKind::Config, where + " must be a matrix");
  size_t rows = arr.size(), cols = arr[0].size();
  Mat m(rows, cols);
  for (size_t i = 0; i < rows; ++i) {
    require(arr[i].is_array() && arr[i].size() == cols, ErrorKind::Config,
            where + " rows must have equal length");
    for (size_t j = 0; j < cols; ++j) m(i, j) = arr[i][j].get<double>();
  }
  return m;
}

struct SystemSpec {
  oracle::Kind kind;
  int n = 0;
  int cutoff = 16;
};

SystemSpec parse_system(const json& doc) {
  require(doc.contains("system"), ErrorKind::Config, "missing 'system' object");
  const json& sys = doc.at("system");
  std::string kind = need<std::string>(sys, "kind", "system");
  SystemSpec out;
  if (kind == "spin")
    out.kind = oracle::Kind::Spin;
  else if (kind == "boson")
    out.kind = oracle::Kind::Boson;
  else if (kind == "fermion")
    out.kind = oracle::Kind::Fermion;
  else
    fail(ErrorKind::Config, "system.kind must be spin|boson|fermion, got '" + kind + "'");
  out.n = need<int>(sys, "n", "system");
  require(out.n > 0, ErrorKind::Config, "system.n must be positive");
  out.cutoff = field<int>(sys, "cutoff", 16);
  return out;
}

OperatorExpr parse_observables(const json& doc, const std::string& key) {
  require(doc.contains(key), ErrorKind::Config, "missing '" + key + "' array");
  std::vector<std::string> lines;
  for (const auto& line : doc.at(key)) {
    require(line.is_string(), ErrorKind::Config, key + " entries must be strings");
    lines.push_back(line.get<std::string>());
  }
  return parse_operator_expr(lines);
}

std::string output_path(const json& doc, const std::string& cli_out) {
  std::string path =
      !cli_out.empty() ? cli_out : field<std::string>(doc, "output", "gcs_results.json");
  const char* dir = std::getenv("GCS_OUT_DIR");
  if (dir && path.find('/') != 0) path = std::string(dir) + "/" + path;
  return path;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(bool(out), ErrorKind::Config, "cannot write output file " + path);
  out << text;
}

std::string header_json(const Config& cfg, const std::string& job) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cfg.hash));
  std::ostringstream out;
  out << "{\n  \"version\": \"" << kVersion << "\",\n  \"config_hash\": \"" << hash
      << "\",\n  \"job\": \"" << job << "\",\n";
  return out.str();
}

/// Build the state from config (explicit coordinate lists or seeded random).
template <class F>
GenState<F> state_from_config(const F& fam, const json& doc, int n_coords, Rng& rng) {
  const json& st = doc.contains("state") ? doc.at("state") : json::object();
  int ell = fam.rank();
  if (st.contains("random")) {
    const json& r = st.at("random");
    double k_scale = field<double>(r, "k_scale", 0.5);
    double m_scale = field<double>(r, "m_scale", 1.0);
    Vec k1 = validate::detail::ball_vec(rng, n_coords, k_scale);
    Vec k2 = validate::detail::ball_vec(rng, n_coords, k_scale);
    Mat M = validate::detail::sym_mat(rng, ell, m_scale);
    return make_state(fam, k1, k2, M);
  }
  Vec k1 = st.contains("g1") ? to_vec(st.at("g1"), "state.g1") : Vec::Zero(n_coords);
  Vec k2 = st.contains("g2") ? to_vec(st.at("g2"), "state.g2") : Vec::Zero(n_coords);
  require(k1.size() == n_coords && k2.size() == n_coords, ErrorKind::Config,
          "state.g1/state.g2 must have " + std::to_string(n_coords) + " coordinates");
  Mat M = st.contains("M") ? to_mat(st.at("M"), "state.M") : Mat::Zero(ell, ell);
  require(M.rows() == ell && M.cols() == ell, ErrorKind::Config,
          "state.M must be " + std::to_string(ell) + "x" + std::to_string(ell));
  return make_state(fam, k1, k2, M);
}

template <class F>
int run_expect(const F& fam, int n_coords, const Config& cfg, const std::string& out_path,
               std::uint64_t seed) {
  Rng rng(seed);
  auto st = state_from_config(fam, cfg.doc, n_coords, rng);
  OperatorExpr obs = parse_observables(cfg.doc, "observables");
  int max_degree = field<int>(cfg.doc, "max_degree", 6);
  Evaluator ev(fam, st, max_degree);
  std::ostringstream out;
  out << header_json(cfg, "expect") << "  \"results\": [\n";
  for (size_t i = 0; i < obs.terms.size(); ++i) {
    OperatorExpr single;
    single.terms.push_back(obs.terms[i]);
    cplx v = ev.expect(single);
    out << "    {\"observable\": \"" << json_escape(format_op_term(obs.terms[i]))
        << "\", \"value\": " << fmt_cplx(v) << "}";
    out << (i + 1 < obs.terms.size() ? ",\n" : "\n");
  }
  out << "  ]\n}\n";
  write_file(out_path, out.str());
  std::printf("expect: %zu observables -> %s\n", obs.terms.size(), out_path.c_str());
  return 0;
}

template <class F>
int run_evolve(const F& fam, int n_coords, const Config& cfg, const std::string& out_path,
               std::uint64_t seed) {
  Rng rng(seed);
  auto st = state_from_config(fam, cfg.doc, n_coords, rng);
  const json& ev = cfg.doc.contains("evolve") ? cfg.doc.at("evolve") : json::object();
  OperatorExpr H = parse_observables(ev, "hamiltonian");
  var::EvolveOptions opt;
  std::string mode = field<std::string>(ev, "mode", "imaginary");
  if (mode == "imaginary")
    opt.mode = var::Mode::Imaginary;
  else if (mode == "real")
    opt.mode = var::Mode::Real;
  else
    fail(ErrorKind::Config, "evolve.mode must be imaginary|real");
  opt.dt = field<double>(ev, "dt", 0.01);
  require(opt.dt > 0, ErrorKind::Config, "evolve.dt must be positive");
  opt.steps = field<int>(ev, "steps", 100);
  opt.freeze_M = field<bool>(ev, "freeze_m", false);
  var::Variational<F> var(fam, st, H, opt.freeze_M);
  auto traj = var.evolve(opt);

  std::ostringstream out;
  out << header_json(cfg, "evolve") << "  \"mode\": \"" << mode << "\",\n  \"records\": [\n";
  for (size_t i = 0; i < traj.size(); ++i) {
    const auto& r = traj[i];
    out << "    {\"step\": " << r.step << ", \"time\": " << fmt(r.time)
        << ", \"energy\": " << fmt(r.energy) << ", \"gram_condition\": " << fmt(r.gram_condition)
        << ", \"params\": [";
    for (int p = 0; p < r.params.size(); ++p)
      out << fmt(r.params(p)) << (p + 1 < r.params.size() ? ", " : "");
    out << "]}" << (i + 1 < traj.size() ? ",\n" : "\n");
  }
  out << "  ]\n}\n";
  write_file(out_path, out.str());

  std::ostringstream csv;
  csv << "step,time,energy,gram_condition";
  for (int p = 0; p < traj.front().params.size(); ++p) csv << ",x" << p;
  csv << "\n";
  for (const auto& r : traj) {
    csv << r.step << "," << fmt(r.time) << "," << fmt(r.energy) << "," << fmt(r.gram_condition);
    for (int p = 0; p < r.params.size(); ++p) csv << "," << fmt(r.params(p));
    csv << "\n";
  }
  write_file(out_path + ".csv", csv.str());
  std::printf("evolve: %d steps, final energy %s -> %s (+.csv)\n", opt.steps,
              fmt(traj.back().energy).c_str(), out_path.c_str());
  return 0;
}

template <class F>
int run_bch(const F& fam, const Config& cfg, const std::string& out_path, bool dump) {
  const json& b = cfg.doc.contains("bch") ? cfg.doc.at("bch") : json::object();
  require(b.contains("k"), ErrorKind::Config, "bch.k coordinate list is required");
  const lie::AlgebraSpec& spec = fam.algebra();
  Vec k = to_vec(b.at("k"), "bch.k");
  require(k.size() == spec.dim, ErrorKind::Config,
          "bch.k must have " + std::to_string(spec.dim) + " coordinates for " + spec.name);
  double tol = field<double>(b, "tolerance", 1e-8);
  auto f = bch::bch_split_generic_z(spec, k, tol);
  double resid =
      (bch::reconstruct(spec, f) - spec.realize_z(k.cast<cplx>()).exp()).cwiseAbs().maxCoeff();
  auto dump_vec = [&](const VecC& v) {
    std::string s = "[";
    for (int i = 0; i < v.size(); ++i) s += fmt_cplx(v(i)) + (i + 1 < v.size() ? ", " : "");
    return s + "]";
  };
  std::ostringstream out;
  out << header_json(cfg, "bch") << "  \"algebra\": \"" << spec.name << "\",\n"
      << "  \"A_plus\": " << dump_vec(f.A_plus) << ",\n"
      << "  \"A_zero\": " << dump_vec(f.A_zero) << ",\n"
      << "  \"A_minus\": " << dump_vec(f.A_minus) << ",\n"
      << "  \"reconstruction_residual\": " << fmt(resid) << "\n}\n";
  write_file(out_path, out.str());
  if (dump) {
    std::printf("T+ coefficients: %s\nT0 coefficients: %s\nT- coefficients: %s\n",
                dump_vec(f.A_plus).c_str(), dump_vec(f.A_zero).c_str(),
                dump_vec(f.A_minus).c_str());
  }
  std::printf("bch: %s, reconstruction residual %s -> %s\n", spec.name.c_str(), fmt(resid).c_str(),
              out_path.c_str());
  return 0;
}

int run_validate(const SystemSpec& sys, const Config& cfg, const std::string& out_path,
                 std::uint64_t seed, int threads) {
  const json& v = cfg.doc.contains("validate") ? cfg.doc.at("validate") : json::object();
  validate::Options opt;
  opt.fixtures = field<int>(v, "fixtures", 10);
  opt.seed = seed;
  opt.threads = threads;
  opt.max_degree = field<int>(v, "max_degree", sys.kind == oracle::Kind::Spin ? 3 : 4);
  opt.k_scale = field<double>(v, "k_scale", sys.kind == oracle::Kind::Boson ? 0.3 : 1.0);
  opt.m_scale = field<double>(v, "m_scale", 1.0);
  opt.degree4_samples = field<int>(v, "degree4_samples", 300);
  double tol = field<double>(v, "tolerance", sys.kind == oracle::Kind::Boson ? 1e-6 : 1e-10);
  auto res = validate::run(sys.kind, sys.n, opt);
  bool pass = res.max_deviation < tol;
  std::ostringstream out;
  out << header_json(cfg, "validate") << "  \"fixtures\": " << opt.fixtures
      << ",\n  \"comparisons\": " << res.comparisons
      << ",\n  \"max_deviation\": " << fmt(res.max_deviation) << ",\n  \"tolerance\": " << fmt(tol)
      << ",\n  \"pass\": " << (pass ? "true" : "false") << "\n}\n";
  write_file(out_path, out.str());
  std::printf("validate: %ld comparisons, max deviation %s (tolerance %s) -> %s\n",
              res.comparisons, fmt(res.max_deviation).c_str(), fmt(tol).c_str(),
              pass ? "PASS" : "FAIL");
  return pass ? 0 : 1;
}

int dispatch(const std::string& job, const Config& cfg, const std::string& cli_out,
             std::uint64_t seed, int threads, bool dump_factors) {
  SystemSpec sys = parse_system(cfg.doc);
  std::string out_path = output_path(cfg.doc, cli_out);
  if (job == "validate") return run_validate(sys, cfg, out_path, seed, threads);
  switch (sys.kind) {
    case oracle::Kind::Spin: {
      spin::SpinFamily fam(sys.n);
      if (job == "expect") return run_expect(fam, 3 * sys.n, cfg, out_path, seed);
      if (job == "evolve") return run_evolve(fam, 3 * sys.n, cfg, out_path, seed);
      return run_bch(fam, cfg, out_path, dump_factors);
    }
    case oracle::Kind::Boson: {
      boson::BosonFamily fam(sys.n);
      int nc = fam.algebra().dim;
      if (job == "expect") return run_expect(fam, nc, cfg, out_path, seed);
      if (job == "evolve") return run_evolve(fam, nc, cfg, out_path, seed);
      return run_bch(fam, cfg, out_path, dump_factors);
    }
    case oracle::Kind::Fermion: {
      fermion::FermionFamily fam(sys.n);
      int nc = fam.algebra().dim;
      if (job == "expect") return run_expect(fam, nc, cfg, out_path, seed);
      if (job == "evolve") return run_evolve(fam, nc, cfg, out_path, seed);
      return run_bch(fam, cfg, out_path, dump_factors);
    }
  }
  fail(ErrorKind::Config, "unreachable system kind");
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse:
    case ErrorKind::Config:
    case ErrorKind::Input:
      return 2;
    default:
      return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalized group-theoretic coherent states"};
  app.require_subcommand(1);
  std::string config_path, out_path;
  std::int64_t seed = -1;
  int threads = 1;
  bool dump_factors = false;
  app.add_option("--config", config_path, "config file (JSON)")->required();
  app.add_option("--out", out_path, "output file path (overrides config)");
  app.add_option("--seed", seed, "RNG seed (overrides config)");
  app.add_option("--threads", threads, "worker thread cap")->check(CLI::PositiveNumber);
  app.add_flag("--dump-factors", dump_factors, "print the Gauss factors (bch job)");
  app.add_subcommand("expect", "evaluate observables on one state")->fallthrough();
  app.add_subcommand("evolve", "variational time evolution")->fallthrough();
  app.add_subcommand("bch", "Gauss splitting of one group element")->fallthrough();
  app.add_subcommand("validate", "pipeline-vs-oracle sweep")->fallthrough();
  CLI11_PARSE(app, argc, argv);

  std::string job = app.get_subcommands().front()->get_name();
  try {
    Config cfg = Config::load(config_path);
    std::uint64_t run_seed =
        seed >= 0 ? std::uint64_t(seed) : std::uint64_t(field<std::int64_t>(cfg.doc, "seed", 1));
    return dispatch(job, cfg, out_path, run_seed, threads, dump_factors);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
