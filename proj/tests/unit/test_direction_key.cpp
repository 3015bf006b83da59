#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "vlcq/direction_key.hpp"

using namespace vlcq;

TEST_CASE("canonical divides out the gcd") {
  const std::vector<std::int64_t> v = {4, -6, 0, 2};
  const auto k = DirectionKey::canonical(v);
  CHECK(std::vector<std::int64_t>(k.coords().begin(), k.coords().end()) == std::vector<std::int64_t>{2, -3, 0, 1});
  CHECK(k.t() == 2);
  CHECK(k.norm2() == 14);
  CHECK(k == DirectionKey::canonical(std::vector<std::int64_t>{2, -3, 0, 1}));
}

TEST_CASE("positive multiples collapse, negatives do not") {
  const auto a = DirectionKey::canonical(std::vector<std::int64_t>{3, 3});
  const auto b = DirectionKey::canonical(std::vector<std::int64_t>{1, 1});
  const auto c = DirectionKey::canonical(std::vector<std::int64_t>{-1, -1});
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("from_primitive validates") {
  CHECK_NOTHROW(DirectionKey::from_primitive({1, 2}));
  CHECK_THROWS(DirectionKey::from_primitive({2, 4}));
  CHECK_THROWS(DirectionKey::from_primitive({0, 0}));
  CHECK_THROWS(DirectionKey::from_primitive({1, 2, 3}));
  CHECK_THROWS(DirectionKey::canonical(std::vector<std::int64_t>{0, 0}));
}

TEST_CASE("gcd and ordering") {
  CHECK(gcd_of(std::vector<std::int64_t>{-12, 18, 0}) == 6);
  CHECK(gcd_of(std::vector<std::int64_t>{0, 0}) == 0);
  const auto a = DirectionKey::from_primitive({0, 1});
  const auto b = DirectionKey::from_primitive({1, 0});
  CHECK(a < b);
  CHECK(a.to_string().find('1') != std::string::npos);
}
