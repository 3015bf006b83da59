#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <vector>

#include "vlcq/codebook.hpp"

using namespace vlcq;

namespace {

// Naive oracle: every integer vector in the box, primitivity by gcd, layer
// taken straight from the grid definition.
std::vector<std::vector<std::int64_t>> naive_layer(int ell, int t) {
  const std::int64_t k = std::int64_t{1} << (ell + 1);
  const int dim = 2 * t;
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> p(static_cast<std::size_t>(dim), -(k - 1));
  const auto in_layer = [&](int l) {
    const std::int64_t kk = std::int64_t{1} << (l + 1);
    std::int64_t n2 = 0;
    for (auto v : p) {
      if (std::abs(v) > kk - 1) return false;
      n2 += v * v;
    }
    return n2 > 0 && n2 <= kk * kk;
  };
  while (true) {
    std::int64_t g = 0;
    for (auto v : p) g = std::gcd(g, v);
    if (g == 1 && in_layer(ell) && (ell == 0 || !in_layer(ell - 1))) out.push_back(p);
    int i = dim - 1;
    while (i >= 0 && p[static_cast<std::size_t>(i)] == k - 1) p[static_cast<std::size_t>(i--)] = -(k - 1);
    if (i < 0) break;
    ++p[static_cast<std::size_t>(i)];
  }
  return out;
}

}  // namespace

TEST_CASE("grid values") {
  const auto g0 = grid_values(0);
  CHECK(g0 == std::vector<double>{-0.5, 0.0, 0.5});
  const auto g2 = grid_values(2);
  CHECK(g2.size() == 15);
  CHECK(g2.front() == -1.0 + 1.0 / 8.0);
  CHECK(g2.back() == 1.0 - 1.0 / 8.0);
}

TEST_CASE("scalar quantizer cases") {
  CHECK(scalar_quantize(0.3, 0) == 0.0);
  CHECK(scalar_quantize(-0.3, 0) == 0.0);
  CHECK(scalar_quantize(0.75, 0) == 0.5);
  CHECK(scalar_quantize(-0.75, 0) == -0.5);
  CHECK(scalar_quantize(1.0, 0) == 0.5);
  CHECK(scalar_quantize(-1.0, 0) == -0.5);
  CHECK(scalar_quantize(0.5, 0) == 0.0);
  CHECK_THROWS(scalar_quantize(1.5, 0));
}

TEST_CASE("scalar quantizer properties") {
  for (int ell = 0; ell <= 8; ++ell) {
    const double eps = std::ldexp(1.0, -(ell + 1));
    const auto grid = grid_values(ell);
    for (int i = 0; i <= 4000; ++i) {
      const double x = -1.0 + i / 2000.0;
      const double q = scalar_quantize(x, ell);
      CHECK(std::abs(q) <= std::abs(x));
      CHECK(std::abs(q - x) <= eps);
      CHECK(std::abs(x) <= std::abs(q) + eps);
      CHECK(std::binary_search(grid.begin(), grid.end(), q));
    }
  }
}

TEST_CASE("layer membership") {
  CHECK(layer_of(std::vector<std::int64_t>{1, 0}) == 0);
  CHECK(layer_of(std::vector<std::int64_t>{1, 1}) == 0);
  CHECK(layer_of(std::vector<std::int64_t>{2, 1}) == 1);
  CHECK(layer_of(std::vector<std::int64_t>{3, 0, 0, 0}) == 1);
  CHECK(ell_min(1) == 0);
  CHECK(ell_min(2) == 1);
  CHECK(ell_min(7) == 1);
  CHECK(ell_min(8) == 2);
}

TEST_CASE("layer counts match a naive enumeration") {
  for (int t : {1, 2}) {
    const int deepest = t == 1 ? 4 : 2;
    const auto sizes = count_layer_sizes(t, deepest);
    std::uint64_t total = 0;
    for (int ell = 0; ell <= deepest; ++ell) {
      const auto naive = naive_layer(ell, t);
      total += naive.size();
      CAPTURE(t);
      CAPTURE(ell);
      CHECK(sizes[static_cast<std::size_t>(ell)] == total);
      const auto walked = enumerate_layer(ell, t);
      REQUIRE(walked.size() == naive.size());
      for (std::size_t i = 0; i < naive.size(); ++i)
        CHECK(std::equal(naive[i].begin(), naive[i].end(), walked[i].coords().begin()));
    }
  }
  CHECK(count_layer_sizes(1, 0).back() == 8);
  CHECK(count_layer_sizes(2, 0).back() == 80);
}

TEST_CASE("stream access is consistent") {
  const CodebookStream s(2, 2);
  std::vector<DirectionKey> seen;
  s.for_each([&](std::uint64_t n, std::span<const std::int64_t> p, std::int64_t n2) {
    CHECK(n == seen.size());
    const auto k = DirectionKey::from_primitive({p.begin(), p.end()});
    CHECK(k.norm2() == n2);
    seen.push_back(k);
    return true;
  });
  REQUIRE(seen.size() == s.size());
  for (std::uint64_t n : {std::uint64_t{0}, std::uint64_t{79}, std::uint64_t{80}, s.size() - 1}) CHECK(s.at(n) == seen[n]);
  CHECK(s.first() == seen[0]);
  const auto pre = s.prefix(100);
  CHECK(std::equal(pre.begin(), pre.end(), seen.begin()));
  CHECK_THROWS(s.at(s.size()));
  std::set<DirectionKey> uniq(seen.begin(), seen.end());
  CHECK(uniq.size() == seen.size());
}

TEST_CASE("first_hit agrees with a linear scan, cached or streamed") {
  const CodebookStream cached(2, 3);
  const CodebookStream streamed(2, 3, 0);
  CHECK(cached.layer_cached(3));
  CHECK_FALSE(streamed.layer_cached(3));
  const auto all = cached.prefix(cached.size());
  RandomStream rs(3, 0);
  for (int i = 0; i < 300; ++i) {
    const auto h = sample_channel(rs, 2);
    const double alpha = 0.7 * h.norm2();
    std::optional<std::uint64_t> expect;
    for (std::uint64_t n = 0; n < all.size(); ++n)
      if (gain(all[n], h) >= alpha) {
        expect = n;
        break;
      }
    CHECK(cached.first_hit(h, alpha) == expect);
    CHECK(streamed.first_hit(h, alpha) == expect);
    if (expect && *expect > 0) CHECK(cached.first_hit(h, alpha, *expect + 1) != expect);
  }
}

TEST_CASE("covering witness bounds") {
  RandomStream rs(9, 0);
  for (int t : {1, 2, 3}) {
    for (int ell = ell_min(t); ell <= 7; ++ell) {
      const double eps = std::ldexp(1.0, -(ell + 1));
      for (int i = 0; i < 500; ++i) {
        const auto hb = sample_channel(rs, t).normalized();
        const auto w = covering_witness(hb, ell);
        CHECK(layer_of(w.key) <= ell);
        CHECK(w.z_norm2() <= 1.0);
        CHECK(w.z_norm2() >= 1.0 - 2.0 * std::sqrt(2.0 * t) * eps);
        CHECK(w.distance2(hb) <= 2.0 * t * eps * eps);
        CHECK(gain(w.key, hb) > 1.0 - 2.0 * t / std::ldexp(1.0, ell));
      }
    }
  }
}

TEST_CASE("codebook CSV round trip and validation") {
  const CodebookStream s(1, 2);
  std::ostringstream os;
  export_codebook_csv(os, s);
  CHECK(os.str().rfind("index,layer,c1,c2\n", 0) == 0);
  std::istringstream is(os.str());
  const auto keys = import_codebook_csv(is);
  CHECK(keys == s.prefix(s.size()));

  std::istringstream not_primitive("index,layer,c1,c2\n0,0,2,0\n");
  CHECK_THROWS(import_codebook_csv(not_primitive));
  std::istringstream wrong_layer("index,layer,c1,c2\n0,1,1,0\n");
  CHECK_THROWS(import_codebook_csv(wrong_layer));
  std::istringstream out_of_order("index,layer,c1,c2\n0,0,1,0\n1,0,0,1\n");
  CHECK_THROWS(import_codebook_csv(out_of_order));
  std::istringstream bad_index("index,layer,c1,c2\n1,0,-1,-1\n");
  CHECK_THROWS(import_codebook_csv(bad_index));
}

TEST_CASE("argument validation") {
  CHECK_THROWS(CodebookStream(0, 2));
  CHECK_THROWS(CodebookStream(2, kMaxLayer + 1));
  CHECK_THROWS(grid_values(-1));
}
