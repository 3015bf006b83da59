#include "vlcq/channel.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vlcq {

double ChannelVector::norm2() const {
  double s = 0.0;
  for (const auto& e : entries) s += std::norm(e);
  return s;
}

ChannelVector ChannelVector::normalized() const {
  const double n = std::sqrt(norm2());
  if (!(n > 0.0)) throw std::domain_error("cannot normalize the zero channel");
  ChannelVector out = *this;
  for (auto& e : out.entries) e /= n;
  return out;
}

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t shard) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(shard), static_cast<std::uint32_t>(shard >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t shard_index,
                           std::uint64_t counter)
    : seed_(master_seed), shard_(shard_index), engine_(seeded_engine(master_seed, shard_index)) {
  engine_.discard(counter);
  counter_ = counter;
}

std::uint64_t RandomStream::next_u64() {
  ++counter_;
  return engine_();
}

double RandomStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_open_low() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

void sample_channel_into(RandomStream& stream, std::span<Complex> out) {
  // Box-Muller: radius sqrt(-ln u1) already carries the 1/2 variance per part.
  for (auto& e : out) {
    const double u1 = stream.uniform_open_low();
    const double u2 = stream.uniform();
    const double r = std::sqrt(-std::log(u1));
    const double phase = 2.0 * std::numbers::pi * u2;
    e = Complex(r * std::cos(phase), r * std::sin(phase));
  }
}

ChannelVector sample_channel(RandomStream& stream, int t) {
  if (t < 1) throw std::domain_error("t must be >= 1");
  ChannelVector h;
  h.entries.resize(static_cast<std::size_t>(t));
  sample_channel_into(stream, h.entries);
  return h;
}

double gain(const DirectionKey& direction, const ChannelVector& h) {
  if (direction.t() != h.t())
    throw std::domain_error("direction has dimension 2*" + std::to_string(direction.t()) +
                            " but channel has t=" + std::to_string(h.t()));
  return gain_raw(direction.coords().data(), direction.norm2(), h.entries.data(), h.t());
}

double gain(std::span<const std::int64_t> raw, const ChannelVector& h) {
  return gain(DirectionKey::canonical(raw), h);
}

}  // namespace vlcq
