#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dqe {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define DQE_ERROR_TYPE(NAME) \
  struct NAME : Error {      \
    explicit NAME(const std::string& msg) : Error(msg) {} \
  }

DQE_ERROR_TYPE(FileNotFound);
DQE_ERROR_TYPE(ShapeMismatch);
DQE_ERROR_TYPE(InvalidLabelValue);
DQE_ERROR_TYPE(NonFiniteIntensity);
DQE_ERROR_TYPE(EmptyMask);
DQE_ERROR_TYPE(InvalidConfig);
DQE_ERROR_TYPE(EmptyGroup);
DQE_ERROR_TYPE(InvalidFraction);
DQE_ERROR_TYPE(EmptyDataset);
DQE_ERROR_TYPE(NonFiniteLoss);
DQE_ERROR_TYPE(InvalidSelection);
DQE_ERROR_TYPE(IOFailure);
DQE_ERROR_TYPE(VersionMismatch);
DQE_ERROR_TYPE(CorruptCheckpoint);
DQE_ERROR_TYPE(ConfigMismatch);
DQE_ERROR_TYPE(InvalidThreshold);
DQE_ERROR_TYPE(EmptyInput);
DQE_ERROR_TYPE(LengthMismatch);
DQE_ERROR_TYPE(EmptySeries);
DQE_ERROR_TYPE(ZeroVariance);
DQE_ERROR_TYPE(NegativeTolerance);
DQE_ERROR_TYPE(InvalidParams);
DQE_ERROR_TYPE(InvalidSeverity);
DQE_ERROR_TYPE(KeyMismatch);
DQE_ERROR_TYPE(EmptyJoin);

#undef DQE_ERROR_TYPE

inline constexpr double kPi = 3.14159265358979323846;

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derive an independent stream seed from a base seed. Used to hand each
// sample/epoch its own RNG so augmentation can run in parallel workers
// without a shared generator.
inline uint64_t derive_seed(uint64_t base, uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// mt19937_64 engine with hand-rolled transforms. The engine is pinned by the
// standard and the transforms below use explicit formulas, so draw sequences
// are reproducible across standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // inclusive bounds
  int64_t uniform_int(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(uniform() * static_cast<double>(hi - lo + 1));
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller, one value per call
  double normal(double mean = 0.0, double sigma = 1.0) {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

// Worker count for parallel regions: DQE_NUM_WORKERS wins, then OpenMP.
inline int num_workers() {
  if (const char* env = std::getenv("DQE_NUM_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void apply_worker_env() {
#ifdef _OPENMP
  if (const char* env = std::getenv("DQE_NUM_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
#endif
}

}  // namespace dqe
