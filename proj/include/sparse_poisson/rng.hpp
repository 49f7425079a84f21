#ifndef SPARSE_POISSON_RNG_HPP
#define SPARSE_POISSON_RNG_HPP

#include <cmath>
#include <cstdint>

namespace sparse_poisson {

// Counter-based generator: output i is splitmix64(key + i*golden), so a
// stream is fully determined by (seed, stream ids) and draws can be taken
// from any thread without shared state.
inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream_a = 0,
                      std::uint64_t stream_b = 0, std::uint64_t stream_c = 0)
      : key_(derive_key(seed, stream_a, stream_b, stream_c)) {}

  std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGolden); }

  // uniform on (0,1); never returns 0 so log() is safe
  double next_double() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a,
                                  std::uint64_t b, std::uint64_t c) {
    std::uint64_t k = mix64(seed + kGolden);
    k = mix64(k ^ (a + 0xd1342543de82ef95ULL));
    k = mix64(k ^ (b + 0x2545f4914f6cdd1dULL));
    k = mix64(k ^ (c + 0x9e6c63d0876a9a35ULL));
    return k;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

double rnorm(CounterRng& rng);
double rgamma(CounterRng& rng, double shape, double rate);
long long rpois(CounterRng& rng, double mean);
long long rbinom(CounterRng& rng, long long trials, double p);

}  // namespace sparse_poisson

#endif
