#include "vlcq/quantizer.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vlcq {

namespace {

using U128 = unsigned __int128;

int bit_width128(U128 v) {
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  if (hi != 0) return 64 + static_cast<int>(std::bit_width(hi));
  return static_cast<int>(std::bit_width(static_cast<std::uint64_t>(v)));
}

// Number of indices n with length_prefix_free(n) <= len, i.e. floor(2^{(len-1)/2}).
std::uint64_t prefix_count_upto(int len) {
  if (len < 1) return 0;
  const int e = len - 1;
  std::uint64_t r = std::uint64_t{1} << (e / 2);
  if (e % 2 == 1) r = static_cast<std::uint64_t>(std::floor(static_cast<double>(r) * std::sqrt(2.0)));
  // exact fix-up: largest r with r^2 <= 2^e
  while (static_cast<U128>(r) * r > (U128{1} << e)) --r;
  while (static_cast<U128>(r + 1) * (r + 1) <= (U128{1} << e)) ++r;
  return r;
}

void verify_sequential_cell(const ChannelVector& h, const CodebookStream& stream, double alpha,
                            std::uint64_t chosen) {
  const Complex* hp = h.entries.data();
  const int t = h.t();
  stream.for_each([&](std::uint64_t n, std::span<const std::int64_t> p, std::int64_t n2) {
    const double g = gain_raw(p.data(), n2, hp, t);
    if (n < chosen && g >= alpha)
      throw std::logic_error("cell check: codeword " + std::to_string(n) + " precedes chosen " +
                             std::to_string(chosen) + " but already clears alpha");
    if (n == chosen) {
      if (g < alpha) throw std::logic_error("cell check: chosen codeword is in outage");
      return false;
    }
    return true;
  });
}

}  // namespace

EncodeOutcome EncodeOutcome::make(std::uint64_t index, bool outage, bool truncated) {
  EncodeOutcome o;
  o.index = index;
  o.len_bstar = length_bstar(index);
  o.len_prefix = length_prefix_free(index);
  o.outage = outage || truncated;
  o.truncated = truncated;
  return o;
}

int length_bstar(std::uint64_t n) {
  return bit_width128(static_cast<U128>(n) + 1) - 1;
}

std::string codeword_bstar(std::uint64_t n) {
  const int len = length_bstar(n);
  const U128 value = static_cast<U128>(n) + 1 - (U128{1} << len);
  std::string out(static_cast<std::size_t>(len), '0');
  for (int i = 0; i < len; ++i)
    if ((value >> (len - 1 - i)) & 1) out[static_cast<std::size_t>(i)] = '1';
  return out;
}

int length_prefix_free(std::uint64_t n) {
  const U128 m = static_cast<U128>(n) + 1;
  // ceil(log2(m^2)) = bit_width(m^2 - 1)
  return 1 + bit_width128(m * m - 1);
}

std::string codeword_prefix_free(std::uint64_t n) {
  const int len = length_prefix_free(n);
  if (len > 63) throw std::domain_error("prefix-free codeword longer than 63 bits");
  // Canonical assignment: first word of length L is (first(L-1) + count(L-1)) << 1.
  std::uint64_t first = 0;
  for (int l = 1; l < len; ++l) {
    const std::uint64_t count = prefix_count_upto(l) - prefix_count_upto(l - 1);
    first = (first + count) << 1;
  }
  const std::uint64_t value = first + (n - prefix_count_upto(len - 1));
  if (value >> len) throw std::logic_error("Kraft assignment overflowed its length");
  std::string out(static_cast<std::size_t>(len), '0');
  for (int i = 0; i < len; ++i)
    if ((value >> (len - 1 - i)) & 1) out[static_cast<std::size_t>(i)] = '1';
  return out;
}

KraftSum kraft_sum(LengthScheme scheme, std::uint64_t n_terms) {
  if (n_terms < 1) throw std::domain_error("kraft_sum needs n_terms >= 1");
  KraftSum k;
  // Terms are nonincreasing; summing from the small end keeps the rounding low.
  for (std::uint64_t i = n_terms; i-- > 0;) {
    const int len = scheme == LengthScheme::kBstar ? length_bstar(i) : length_prefix_free(i);
    k.partial += std::ldexp(1.0, -len);
  }
  k.tail_bound = scheme == LengthScheme::kBstar ? std::numeric_limits<double>::infinity()
                                                 : 0.5 / static_cast<double>(n_terms);
  return k;
}

EncodeOutcome encode_vlq(const ChannelVector& h, const CodebookStream& stream, double alpha,
                         const EncodeOptions& options) {
  if (h.t() != stream.t()) throw std::domain_error("channel dimension does not match codebook");
  if (h.norm2() < alpha) return EncodeOutcome::make(0, true);
  const auto hit = stream.first_hit(h, alpha);
  if (!hit) return EncodeOutcome::make(0, true, true);
  if (options.verify_cells) verify_sequential_cell(h, stream, alpha, *hit);
  return EncodeOutcome::make(*hit, false);
}

std::size_t encode_flq_standard(const ChannelVector& h, std::span<const DirectionKey> codebook) {
  if (codebook.empty()) throw std::domain_error("empty codebook");
  std::size_t best = 0;
  double best_gain = gain(codebook[0], h);
  for (std::size_t i = 1; i < codebook.size(); ++i) {
    const double g = gain(codebook[i], h);
    if (g > best_gain) {
      best_gain = g;
      best = i;
    }
  }
  return best;
}

EncodeOutcome encode_flq_sequential(const ChannelVector& h, std::span<const DirectionKey> codebook,
                                    double alpha) {
  if (codebook.empty()) throw std::domain_error("empty codebook");
  for (std::size_t i = 0; i < codebook.size(); ++i)
    if (gain(codebook[i], h) >= alpha) return EncodeOutcome::make(i, false);
  return EncodeOutcome::make(0, true);
}

EncodeOutcome encode_precoding(const ChannelVector& h, const CodebookStream& stream, double alpha,
                               const EncodeOptions& options) {
  if (h.t() != stream.t()) throw std::domain_error("channel dimension does not match codebook");
  const double n2 = h.norm2();
  // ||X h|| <= ||X||_F ||h|| = ||h|| for every feasible precoder.
  if (n2 < alpha) return EncodeOutcome::make(0, true);
  if (n2 / static_cast<double>(h.t()) >= alpha) return EncodeOutcome::make(0, false);
  const auto hit = stream.first_hit(h, alpha);
  if (!hit) return EncodeOutcome::make(0, true, true);
  if (options.verify_cells) verify_sequential_cell(h, stream, alpha, *hit);
  return EncodeOutcome::make(*hit + 1, false);
}

}  // namespace vlcq
