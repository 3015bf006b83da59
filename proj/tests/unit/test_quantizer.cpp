#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "vlcq/quantizer.hpp"

using namespace vlcq;

TEST_CASE("codeword lengths match their definitions") {
  for (std::uint64_t n = 0; n < 100000; ++n) {
    const double m = static_cast<double>(n) + 1.0;
    CHECK(length_bstar(n) == static_cast<int>(std::floor(std::log2(m))));
    CHECK(length_prefix_free(n) == static_cast<int>(std::ceil(2.0 * std::log2(m) + 1.0)));
  }
  CHECK(length_bstar(0) == 0);
  CHECK(length_prefix_free(0) == 1);
  CHECK(length_bstar(UINT64_MAX) == 64);
  CHECK(length_prefix_free(UINT64_MAX) == 129);
}

TEST_CASE("b* words list every binary string in order") {
  std::vector<std::string> expect = {""};
  for (int len = 1; len <= 10; ++len)
    for (int v = 0; v < (1 << len); ++v) {
      std::string s;
      for (int i = len - 1; i >= 0; --i) s += ((v >> i) & 1) ? '1' : '0';
      expect.push_back(s);
    }
  for (std::size_t n = 0; n < expect.size(); ++n) CHECK(codeword_bstar(n) == expect[n]);
}

TEST_CASE("prefix-free words are prefix free with the stated lengths") {
  const std::uint64_t n_max = 3000;
  std::vector<std::string> words;
  for (std::uint64_t n = 0; n < n_max; ++n) {
    words.push_back(codeword_prefix_free(n));
    CHECK(static_cast<int>(words.back().size()) == length_prefix_free(n));
  }
  std::vector<std::string> sorted = words;
  std::sort(sorted.begin(), sorted.end());
  // in sorted order a prefix sits right before some word it prefixes
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) CHECK(sorted[i + 1].rfind(sorted[i], 0) != 0);
}

TEST_CASE("Kraft sums") {
  const auto pf = kraft_sum(LengthScheme::kPrefixFree, 100000);
  double direct = 0;
  for (std::uint64_t n = 0; n < 100000; ++n) direct += std::ldexp(1.0, -length_prefix_free(n));
  CHECK(pf.partial == doctest::Approx(direct).epsilon(1e-12));
  CHECK(pf.partial + pf.tail_bound < 1.0);
  // 2^-ceil(2 log2 m + 1) <= 1/(2 m^2); the full series is below pi^2/12
  CHECK(pf.partial <= std::numbers::pi * std::numbers::pi / 12.0);
  const auto bs = kraft_sum(LengthScheme::kBstar, 3);
  CHECK(bs.partial == doctest::Approx(2.0));
  CHECK(std::isinf(bs.tail_bound));
}

TEST_CASE("vlq encoder") {
  const CodebookStream s(2, 3);
  RandomStream rs(21, 0);
  for (int i = 0; i < 2000; ++i) {
    const auto h = sample_channel(rs, 2);
    const double alpha = 0.5;
    const auto o = encode_vlq(h, s, alpha, EncodeOptions{true});
    if (h.norm2() < alpha) {
      CHECK(o.outage);
      CHECK(o.index == 0);
      CHECK_FALSE(o.truncated);
    } else if (!o.truncated) {
      CHECK_FALSE(o.outage);
      CHECK(gain(s.at(o.index), h) >= alpha);
    }
    CHECK(o.len_bstar == length_bstar(o.index));
    CHECK(o.len_prefix == length_prefix_free(o.index));
  }
  CHECK_THROWS(encode_vlq(ChannelVector{{Complex(1, 0)}}, s, 0.1));
}

TEST_CASE("truncation is flagged as outage") {
  const CodebookStream s(2, 0);
  // a channel between two codebook-0 directions with alpha just under its energy
  ChannelVector h{{Complex(1.0, 0.3), Complex(0.2, 0.9)}};
  const auto o = encode_vlq(h, s, h.norm2() * 0.999999);
  CHECK(o.truncated);
  CHECK(o.outage);
  CHECK(o.index == 0);
}

TEST_CASE("flq encoders") {
  const CodebookStream s(2, 1);
  const auto book = s.prefix(80);
  RandomStream rs(2, 0);
  for (int i = 0; i < 2000; ++i) {
    const auto h = sample_channel(rs, 2);
    const std::size_t best = encode_flq_standard(h, book);
    for (std::size_t k = 0; k < best; ++k) CHECK(gain(book[k], h) < gain(book[best], h));
    for (std::size_t k = best; k < book.size(); ++k) CHECK(gain(book[k], h) <= gain(book[best], h));
    const auto seq = encode_flq_sequential(h, book, 0.4);
    CHECK(seq.outage == (gain(book[best], h) < 0.4));
  }
  CHECK_THROWS(encode_flq_standard(sample_channel(rs, 2), {}));
}

TEST_CASE("precoding encoder") {
  const CodebookStream s(2, 3);
  ChannelVector small{{Complex(0.1, 0), Complex(0, 0.1)}};
  auto o = encode_precoding(small, s, 0.5);
  CHECK((o.outage && o.index == 0));
  ChannelVector big{{Complex(1, 0), Complex(0, 1)}};
  o = encode_precoding(big, s, 0.5);
  CHECK((!o.outage && o.index == 0));
  ChannelVector band{{Complex(0.9, 0), Complex(0, 0.2)}};
  o = encode_precoding(band, s, 0.7);
  REQUIRE_FALSE(o.outage);
  CHECK(o.index >= 1);
  CHECK(gain(s.at(o.index - 1), band) >= 0.7);
}
