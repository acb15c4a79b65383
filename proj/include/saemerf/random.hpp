#ifndef SAEMERF_RANDOM_HPP
#define SAEMERF_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>

namespace saemerf {

// splitmix64 finalizer; used to derive independent substream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic seed for a substream identified by a chain of ids,
// e.g. derive_seed(seed, {kTreeStream, tree_index}). Parallel and serial
// execution agree because every unit of work owns its own stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
  std::uint64_t s = mix64(seed);
  for (std::uint64_t id : ids) s = mix64(s ^ mix64(id));
  return s;
}

// FNV-1a; stable across platforms (std::hash is not).
inline std::uint64_t hash_string(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Stream tags for derive_seed chains. One tag per independent use so that
// adding draws to one consumer never shifts another's stream.
enum StreamTag : std::uint64_t {
  kTreeStream = 1,
  kMerfIterationStream = 2,
  kDonorStream = 3,
  kSmearStream = 4,
  kBootstrapStream = 5,
  kPopulationStream = 6,
  kSampleStream = 7,
  kReplicateStream = 8,
};

// mt19937_64 engine with hand-rolled samplers. The standard distribution
// objects are implementation-defined, which would tie frozen test values
// and output files to one standard library; these samplers are portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe under log().
  double uniform_open() { return 1.0 - uniform(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer on [0, n) by rejection.
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t rem = (UINT64_MAX % n + 1) % n;  // 2^64 mod n
    const std::uint64_t limit = UINT64_MAX - rem;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v > limit);
    return v % n;
  }

  // Box-Muller, cosine branch only; one normal per two uniforms.
  double normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Pareto type I with minimum `scale` and tail index `shape`.
  double pareto(double shape, double scale) {
    return scale * std::pow(uniform_open(), -1.0 / shape);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace saemerf

#endif  // SAEMERF_RANDOM_HPP
