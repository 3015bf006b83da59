#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "vlcq/channel.hpp"

using namespace vlcq;

TEST_CASE("random stream is reproducible and counts draws") {
  RandomStream a(7, 3), b(7, 3), c(7, 4);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    (void)c.next_u64();
  }
  CHECK(a.counter() == 100);
  RandomStream d(7, 3);
  RandomStream e(7, 4);
  CHECK(d.next_u64() != e.next_u64());
  // fast-forward via the counter argument
  RandomStream f(7, 3, 100);
  CHECK(f.next_u64() == a.next_u64());
}

TEST_CASE("uniform ranges") {
  RandomStream rs(1, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = rs.uniform();
    CHECK_UNARY(u >= 0.0 && u < 1.0);
    const double v = rs.uniform_open_low();
    CHECK_UNARY(v > 0.0 && v <= 1.0);
  }
}

TEST_CASE("channel entries are unit-variance circular Gaussians") {
  RandomStream rs(11, 0);
  const int n = 200000;
  double m2 = 0, m4 = 0, re = 0, im = 0;
  for (int i = 0; i < n; ++i) {
    const auto h = sample_channel(rs, 2);
    for (const auto& z : h.entries) {
      const double p = std::norm(z);
      m2 += p;
      m4 += p * p;
      re += z.real();
      im += z.imag();
    }
  }
  const double k = 2.0 * n;
  // |h|^2 ~ Exp(1): mean 1, second moment 2
  CHECK(m2 / k == doctest::Approx(1.0).epsilon(0.01));
  CHECK(m4 / k == doctest::Approx(2.0).epsilon(0.03));
  CHECK(std::abs(re / k) < 0.01);
  CHECK(std::abs(im / k) < 0.01);
}

TEST_CASE("gain is scale invariant and bounded by the channel energy") {
  RandomStream rs(5, 0);
  for (int i = 0; i < 1000; ++i) {
    const auto h = sample_channel(rs, 3);
    const std::vector<std::int64_t> p = {1, -2, 3, 0, -1, 1};
    const std::vector<std::int64_t> p3 = {3, -6, 9, 0, -3, 3};
    const double g = gain(p, h);
    CHECK(g == doctest::Approx(gain(p3, h)).epsilon(1e-12));
    CHECK(g <= h.norm2() * (1 + 1e-12));
  }
}

TEST_CASE("gain along the channel itself equals its energy") {
  ChannelVector h{{Complex(3, -1), Complex(0, 2)}};
  const std::vector<std::int64_t> p = {3, -1, 0, 2};
  CHECK(gain(p, h) == doctest::Approx(h.norm2()).epsilon(1e-14));
  CHECK(h.normalized().norm2() == doctest::Approx(1.0));
}

TEST_CASE("gain rejects mismatched dimensions") {
  ChannelVector h{{Complex(1, 0)}};
  CHECK_THROWS(gain(DirectionKey::from_primitive({1, 0, 0, 1}), h));
  CHECK_THROWS(ChannelVector{{Complex(0, 0)}}.normalized());
}
