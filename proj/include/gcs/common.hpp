#pragma once

#include <atomic>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace gcs {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;
using Mat2C = Eigen::Matrix2cd;

inline constexpr cplx I{0.0, 1.0};

enum class ErrorKind {
  Input,
  Config,
  DecompositionBreakdown,
  Integration,
  Cutoff,
  Branch,
  StalledManifold,
  Parse,
};

inline const char* error_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Input: return "input-error";
    case ErrorKind::Config: return "config-error";
    case ErrorKind::DecompositionBreakdown: return "decomposition-breakdown";
    case ErrorKind::Integration: return "integration-error";
    case ErrorKind::Cutoff: return "cutoff-error";
    case ErrorKind::Branch: return "branch-error";
    case ErrorKind::StalledManifold: return "stalled-manifold";
    case ErrorKind::Parse: return "parse-error";
  }
  return "unknown-error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(error_name(kind)) + ": " + msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& msg) { throw Error(k, msg); }

inline void require(bool cond, ErrorKind k, const std::string& msg) {
  if (!cond) fail(k, msg);
}

/// Deterministic RNG: xoshiro-free, just mt19937_64 with explicit double mapping so
/// runs are bit-reproducible independent of the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// uniform in [0,1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  /// uniform in [lo,hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
};

/// Chunked parallel map with deterministic result placement. n_threads <= 1 runs inline.
inline void parallel_for(int n, int n_threads, const std::function<void(int)>& body) {
  if (n_threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  int workers = std::min(n_threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<int> cursor{0};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        int i = cursor.fetch_add(1);
        if (i >= n) return;
        body(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

/// FNV-1a 64-bit, used to stamp result files with their config.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace gcs
