#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "vlcq/direction_key.hpp"

namespace vlcq {

using Complex = std::complex<double>;

/// One channel realization h in C^t.
struct ChannelVector {
  std::vector<Complex> entries;

  int t() const { return static_cast<int>(entries.size()); }
  double norm2() const;
  /// h / ||h||. Throws std::domain_error for the zero vector.
  ChannelVector normalized() const;
};

/// Reproducible source of randomness for one shard of a Monte Carlo run.
///
/// The engine is std::mt19937_64 seeded from (master_seed, shard_index)
/// through std::seed_seq, so distinct shards get unrelated streams. `counter`
/// is the number of 64-bit words consumed; a stream rebuilt at the same
/// (master_seed, shard_index, counter) replays identical output.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t shard_index, std::uint64_t counter = 0);

  std::uint64_t master_seed() const { return seed_; }
  std::uint64_t shard_index() const { return shard_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open_low();

 private:
  std::uint64_t seed_;
  std::uint64_t shard_;
  std::uint64_t counter_ = 0;
  std::mt19937_64 engine_;
};

/// Draws h with i.i.d. CN(0,1) entries (real and imaginary parts N(0, 1/2)).
/// Box-Muller over stream.uniform(); consumes exactly 2t words per call.
ChannelVector sample_channel(RandomStream& stream, int t);

/// Writes into an existing buffer; same draws as sample_channel.
void sample_channel_into(RandomStream& stream, std::span<Complex> out);

/// |<p, h>|^2 / ||p||^2 for a raw integer direction p (2t coords, packed as
/// in DirectionKey) with <x, h> = sum conj(x_i) h_i. This is the single
/// definition of beamforming gain used by every encoder, so outage decisions
/// made by different encoders on the same (p, h) always agree bit for bit.
///
/// For t = 1 every nonzero p is a unit scalar and the gain is |h|^2.
template <class Int>
inline double gain_raw(const Int* p, std::int64_t norm2, const Complex* h, int t) {
  if (t == 1) return std::norm(h[0]);
  double re = 0.0;
  double im = 0.0;
  for (int i = 0; i < t; ++i) {
    const double a = static_cast<double>(p[2 * i]);
    const double b = static_cast<double>(p[2 * i + 1]);
    const double x = h[i].real();
    const double y = h[i].imag();
    re += a * x + b * y;
    im += a * y - b * x;
  }
  return (re * re + im * im) / static_cast<double>(norm2);
}

/// Gain of a canonical direction. Throws std::domain_error on dimension mismatch.
double gain(const DirectionKey& direction, const ChannelVector& h);

/// Gain of an arbitrary nonzero integer vector; it is reduced to its primitive
/// key first, so gain(m * p, h) == gain(p, h) exactly for integer m > 0.
double gain(std::span<const std::int64_t> raw, const ChannelVector& h);

}  // namespace vlcq
