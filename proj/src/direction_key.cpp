#include "vlcq/direction_key.hpp"

#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace vlcq {

std::int64_t gcd_of(std::span<const std::int64_t> coords) {
  std::int64_t g = 0;
  for (std::int64_t c : coords) {
    g = std::gcd(g, c);
    if (g == 1) break;
  }
  return g;
}

namespace {

void check_shape(std::span<const std::int64_t> c) {
  if (c.empty() || c.size() % 2 != 0)
    throw std::domain_error("direction needs 2t integer coordinates");
}

}  // namespace

DirectionKey DirectionKey::from_primitive(std::vector<std::int64_t> coords) {
  check_shape(coords);
  const std::int64_t g = gcd_of(coords);
  if (g == 0) throw std::domain_error("direction must be nonzero");
  if (g != 1) throw std::domain_error("direction is not primitive: gcd " + std::to_string(g));
  return DirectionKey(std::move(coords));
}

DirectionKey DirectionKey::canonical(std::span<const std::int64_t> coords) {
  check_shape(coords);
  const std::int64_t g = gcd_of(coords);
  if (g == 0) throw std::domain_error("direction must be nonzero");
  std::vector<std::int64_t> c(coords.begin(), coords.end());
  for (auto& v : c) v /= g;
  return DirectionKey(std::move(c));
}

std::int64_t DirectionKey::norm2() const {
  std::int64_t s = 0;
  for (std::int64_t c : coords_) s += c * c;
  return s;
}

std::string DirectionKey::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(coords_[i]);
  }
  return s + ")";
}

}  // namespace vlcq
