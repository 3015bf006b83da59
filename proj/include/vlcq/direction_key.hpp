#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vlcq {

/// A beamforming direction in C^t stored as a primitive integer vector of
/// R^{2t}. Complex entry i is (coords[2i], coords[2i+1]) = (real, imag).
///
/// Two integer vectors name the same unit direction iff they are positive
/// multiples of each other, so the primitive vector (gcd of the absolute
/// values equal to 1) is the canonical representative.
class DirectionKey {
 public:
  DirectionKey() = default;

  /// Requires a nonzero primitive vector of even length.
  static DirectionKey from_primitive(std::vector<std::int64_t> coords);
  /// Divides a nonzero even-length vector by the gcd of its entries.
  static DirectionKey canonical(std::span<const std::int64_t> coords);

  std::span<const std::int64_t> coords() const { return coords_; }
  int t() const { return static_cast<int>(coords_.size() / 2); }
  std::int64_t norm2() const;
  std::string to_string() const;

  friend bool operator==(const DirectionKey&, const DirectionKey&) = default;
  friend auto operator<=>(const DirectionKey& a, const DirectionKey& b) {
    return a.coords_ <=> b.coords_;
  }

 private:
  explicit DirectionKey(std::vector<std::int64_t> c) : coords_(std::move(c)) {}
  std::vector<std::int64_t> coords_;
};

/// gcd of |coords|; 0 for the zero vector.
std::int64_t gcd_of(std::span<const std::int64_t> coords);

}  // namespace vlcq
