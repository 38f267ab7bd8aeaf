#pragma once

#include <cmath>
#include <cstdint>

namespace aevt {

// Splittable counter-seeded stream: (seed, stream_id) fully determines the
// sequence, so parallel replications can each own an independent substream.
// State setup runs (seed, stream_id) through splitmix64; the generator is
// xoshiro256++ (Blackman & Vigna).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_(stream_id) {
    std::uint64_t x = seed;
    s_[0] = splitmix(x);
    s_[1] = splitmix(x);
    x ^= 0x9e3779b97f4a7c15ULL * (stream_id + 1);
    s_[2] = splitmix(x);
    s_[3] = splitmix(x);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  // independent child stream; substream(k) != substream(j) for k != j
  RngStream substream(std::uint64_t k) const {
    std::uint64_t x = stream_ ^ (k + 0x9e3779b97f4a7c15ULL);
    return RngStream(seed_, splitmix(x));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform on (0, 1]: never 0, so -log is finite
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // uniform on [0, 1)
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double exponential() { return -std::log(uniform_pos()); }

  // uniform integer in {lo, ..., hi}
  long uniform_int(long lo, long hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<long>(next_u64() % span);
  }

  double normal() {
    // Box-Muller, one value per call; the spare is discarded to keep
    // substream reproducibility independent of call interleaving
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  static std::uint64_t splitmix(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace aevt
