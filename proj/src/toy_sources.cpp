#include "vlcq/toy_sources.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vlcq/quantizer.hpp"

namespace vlcq {

namespace {

constexpr double kNorm = 6.0 / (std::numbers::pi * std::numbers::pi);
constexpr std::uint64_t kAsymptoticFrom = 64;

// Euler-Maclaurin for sum_{m >= x} 1/m^2; next omitted term is ~1/(30 x^9).
double euler_maclaurin_tail(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return inv * (1.0 + inv * (0.5 + inv * (1.0 / 6.0 + inv2 * (-1.0 / 30.0 + inv2 * (1.0 / 42.0)))));
}

}  // namespace

double toy_probability(std::uint64_t n) {
  const double m = static_cast<double>(n) + 1.0;
  return kNorm / (m * m);
}

double inverse_square_tail(std::uint64_t first) {
  if (first < 1) throw std::domain_error("inverse_square_tail needs first >= 1");
  if (first >= kAsymptoticFrom) return euler_maclaurin_tail(static_cast<double>(first));
  double s = euler_maclaurin_tail(static_cast<double>(kAsymptoticFrom));
  for (std::uint64_t m = kAsymptoticFrom - 1; m >= first; --m) {
    const double md = static_cast<double>(m);
    s += 1.0 / (md * md);
  }
  return s;
}

double toy_cumulative(std::uint64_t n) {
  if (n == 0) return 0.0;
  return 1.0 - kNorm * inverse_square_tail(n + 1);
}

RateBracket toy_vlq_rate(std::uint64_t n_trunc) {
  if (n_trunc < 1) throw std::domain_error("toy_vlq_rate needs n_trunc >= 1");
  RateBracket b;
  for (std::uint64_t n = n_trunc; n-- > 0;)
    b.lower += toy_probability(n) * static_cast<double>(length_prefix_free(n));
  // Remaining terms: len_n <= 2 log2(m) + 2 with m = n + 1 >= M, and
  // f(x) = (a ln x + b) / x^2 is decreasing on [1, inf), so
  // sum_{m >= M} f(m) <= f(M) + (a ln M + a + b) / M.
  const double a = 2.0 / std::numbers::ln2;
  const double bb = 2.0;
  const double m = static_cast<double>(n_trunc) + 1.0;
  const double lm = std::log(m);
  const double tail = (a * lm + bb) / (m * m) + (a * lm + a + bb) / m;
  b.upper = b.lower + kNorm * tail;
  return b;
}

double toy_flq_distortion(std::uint64_t levels) {
  if (levels < 1) throw std::domain_error("toy_flq_distortion needs N >= 1");
  return kNorm * inverse_square_tail(levels + 1);
}

std::uint64_t example2_encode(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("example2_encode needs x in [0, 1]");
  if (x == 1.0) return 0;
  // smallest n with x < C_{n+1}
  std::uint64_t hi = 1;
  while (!(x < toy_cumulative(hi + 1))) {
    if (hi > (std::uint64_t{1} << 61)) throw std::logic_error("example2_encode did not bracket x");
    hi *= 2;
  }
  std::uint64_t lo = 0;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (x < toy_cumulative(mid + 1)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  while (lo > 0 && x < toy_cumulative(lo)) --lo;
  return lo;
}

int example2_distortion(double x, std::uint64_t n) {
  if (x == 1.0) return n == 0 ? 0 : 1;
  return (toy_cumulative(n) <= x && x < toy_cumulative(n + 1)) ? 0 : 1;
}

}  // namespace vlcq
