#pragma once

// Layered dyadic beamforming codebook Y_0 ⊂ Y_1 ⊂ ... over C^t.
//
// Grid layer l holds the points j / 2^{l+1} with integer |j_i| <= 2^{l+1} - 1
// and 0 < ||j|| <= 2^{l+1}. Every such point names the same direction as the
// primitive vector j / gcd(j), and that primitive vector is itself a grid
// point of layer l, so the direction set of Y_l is exactly the set of
// primitive integer vectors inside
//
//   F_l = { p : ||p||^2 <= 4^{l+1}, max_i |p_i| <= 2^{l+1} - 1 }.
//
// The codebook order is: layer by layer (layer_of), lexicographic inside a
// layer. All membership tests are integer comparisons.

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "vlcq/channel.hpp"
#include "vlcq/direction_key.hpp"

namespace vlcq {

/// Largest supported layer; coordinates then fit in int16.
inline constexpr int kMaxLayer = 14;

/// S_l in ascending order: j / 2^{l+1}, |j| <= 2^{l+1} - 1.
std::vector<double> grid_values(int ell);

/// Numerator j of the scalar quantizer q(x) = j / 2^{l+1}. Cases are tried in
/// written order: [-1, -eps] rounds toward zero onto the grid, [-eps, eps]
/// maps to 0, (eps, 1] rounds toward zero. Throws for |x| > 1.
std::int64_t scalar_quantize_numerator(double x, int ell);
double scalar_quantize(double x, int ell);

/// Smallest l with ||p||^2 <= 4^{l+1} and max|p_i| <= 2^{l+1} - 1.
int layer_of(std::span<const std::int64_t> p);
int layer_of(const DirectionKey& p);

/// Smallest l with 2t / 4^{l+1} < 1: below it the covering witness can
/// collapse to the zero vector.
int ell_min(int t);

/// Unit vector p / ||p|| in C^t. Throws std::domain_error for p = 0.
std::vector<Complex> unit_vector_of(std::span<const std::int64_t> p);

namespace detail {

inline std::int64_t isqrt(std::int64_t v) {
  if (v <= 0) return 0;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

/// Bitmask of the primes <= 61 dividing v; all bits set for v = 0.
std::uint64_t small_prime_mask(std::int64_t v);

/// Depth-first walk over the integer points of layer `ell`, in ascending
/// lexicographic order, emitting primitive vectors only.
template <class Visit>
class LayerWalker {
 public:
  LayerWalker(int ell, int t, Visit& visit)
      : dim_(2 * t),
        max_abs_((std::int64_t{1} << (ell + 1)) - 1),
        radius2_(std::int64_t{1} << (2 * (ell + 1))),
        prev_max_abs_(ell > 0 ? (std::int64_t{1} << ell) - 1 : -1),
        prev_radius2_(ell > 0 ? (std::int64_t{1} << (2 * ell)) : -1),
        p_(static_cast<std::size_t>(dim_)),
        visit_(visit) {
    masks_.resize(static_cast<std::size_t>(max_abs_ + 1));
    for (std::int64_t v = 0; v <= max_abs_; ++v) masks_[static_cast<std::size_t>(v)] = small_prime_mask(v);
  }

  std::uint64_t run() {
    walk(0, 0, 0, ~std::uint64_t{0}, std::numeric_limits<std::int64_t>::max());
    return emitted_;
  }

 private:
  void walk(int k, std::int64_t used, std::int64_t maxabs, std::uint64_t mask, std::int64_t minnz) {
    const std::int64_t lim = std::min(max_abs_, isqrt(radius2_ - used));
    for (std::int64_t v = -lim; v <= lim && !stop_; ++v) {
      p_[static_cast<std::size_t>(k)] = v;
      const std::int64_t a = v < 0 ? -v : v;
      const std::int64_t u = used + v * v;
      const std::int64_t ma = a > maxabs ? a : maxabs;
      const std::uint64_t mk = mask & masks_[static_cast<std::size_t>(a)];
      const std::int64_t mn = (a != 0 && a < minnz) ? a : minnz;
      if (k + 1 < dim_) {
        walk(k + 1, u, ma, mk, mn);
      } else {
        leaf(u, ma, mk, mn);
      }
    }
  }

  void leaf(std::int64_t n2, std::int64_t maxabs, std::uint64_t mask, std::int64_t minnz) {
    if (n2 == 0) return;
    if (prev_max_abs_ >= 0 && n2 <= prev_radius2_ && maxabs <= prev_max_abs_) return;
    if (mask != 0) return;
    // No prime <= 61 divides every entry; a larger common prime needs every
    // nonzero entry to be at least 67.
    if (minnz >= 67 && gcd_of(p_) != 1) return;
    ++emitted_;
    if (!visit_(std::span<const std::int64_t>(p_), n2)) stop_ = true;
  }

  int dim_;
  std::int64_t max_abs_, radius2_, prev_max_abs_, prev_radius2_;
  std::vector<std::int64_t> p_;
  std::vector<std::uint64_t> masks_;
  Visit& visit_;
  bool stop_ = false;
  std::uint64_t emitted_ = 0;
};

void check_layer_args(int ell, int t);

}  // namespace detail

/// Calls visit(std::span<const int64_t> p, int64_t norm2) for each primitive
/// vector of layer `ell` in ascending lexicographic order. Returning false
/// from visit stops the walk. Returns the number of vectors visited.
template <class Visit>
std::uint64_t for_each_in_layer(int ell, int t, Visit&& visit) {
  detail::check_layer_args(ell, t);
  detail::LayerWalker<std::remove_reference_t<Visit>> walker(ell, t, visit);
  return walker.run();
}

std::vector<DirectionKey> enumerate_layer(int ell, int t);

/// Cumulative direction counts |Y_0|, ..., |Y_{ell_max}| obtained by Mobius
/// inversion over lattice-point counts of the scaled regions F_l / d. Does
/// not enumerate anything. Throws std::overflow_error past 2^63.
std::vector<std::uint64_t> count_layer_sizes(int t, int ell_max);

/// Lazily materialized, deduplicated, ordered codebook y_0, y_1, ... covering
/// layers 0..ell_max.
///
/// Layers are built on first use. A layer is kept in memory only while the
/// running total stays under the cache budget; larger layers are re-walked on
/// every request and never stored. All const members are safe to call from
/// several threads.
class CodebookStream {
 public:
  static constexpr std::size_t kDefaultCacheBudget = std::size_t{256} << 20;

  CodebookStream(int t, int ell_max, std::size_t cache_budget_bytes = kDefaultCacheBudget);
  ~CodebookStream();
  CodebookStream(const CodebookStream&) = delete;
  CodebookStream& operator=(const CodebookStream&) = delete;

  int t() const { return t_; }
  int ell_max() const { return ell_max_; }
  /// Cumulative sizes: layer_sizes()[l] == |Y_l|.
  const std::vector<std::uint64_t>& layer_sizes() const { return sizes_; }
  std::uint64_t size() const { return sizes_.back(); }
  bool layer_cached(int ell) const { return cacheable_[static_cast<std::size_t>(ell)]; }

  /// y_n. Throws std::out_of_range for n >= size().
  DirectionKey at(std::uint64_t n) const;
  const DirectionKey& first() const { return first_; }
  /// First min(n, size()) directions.
  std::vector<DirectionKey> prefix(std::uint64_t n) const;

  /// Smallest n >= from with gain(y_n, h) >= alpha, or nullopt if no codeword
  /// up to layer ell_max clears the threshold.
  std::optional<std::uint64_t> first_hit(const ChannelVector& h, double alpha,
                                         std::uint64_t from = 0) const;

  /// Sequential visit of y_0, y_1, ...; visit(index, span coords, norm2)
  /// returning false stops.
  template <class Visit>
  void for_each(Visit&& visit) const;

 private:
  struct Layer {
    std::vector<std::int16_t> coords;
    std::vector<std::int32_t> norm2;
  };
  const Layer& cached_layer(int ell) const;
  std::uint64_t layer_begin(int ell) const { return ell == 0 ? 0 : sizes_[static_cast<std::size_t>(ell - 1)]; }

  int t_;
  int ell_max_;
  std::vector<std::uint64_t> sizes_;
  std::vector<bool> cacheable_;
  DirectionKey first_;
  mutable std::unique_ptr<std::once_flag[]> once_;
  mutable std::vector<std::unique_ptr<Layer>> layers_;
};

template <class Visit>
void CodebookStream::for_each(Visit&& visit) const {
  const int dim = 2 * t_;
  std::vector<std::int64_t> buf(static_cast<std::size_t>(dim));
  for (int ell = 0; ell <= ell_max_; ++ell) {
    std::uint64_t n = layer_begin(ell);
    if (cacheable_[static_cast<std::size_t>(ell)]) {
      const Layer& layer = cached_layer(ell);
      for (std::size_t i = 0; i < layer.norm2.size(); ++i, ++n) {
        for (int c = 0; c < dim; ++c) buf[static_cast<std::size_t>(c)] = layer.coords[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(c)];
        if (!visit(n, std::span<const std::int64_t>(buf), std::int64_t{layer.norm2[i]})) return;
      }
    } else {
      bool stopped = false;
      auto step = [&](std::span<const std::int64_t> p, std::int64_t n2) {
        if (!visit(n, p, n2)) {
          stopped = true;
          return false;
        }
        ++n;
        return true;
      };
      for_each_in_layer(ell, t_, step);
      if (stopped) return;
    }
  }
}

/// Proof witness for the covering property: z has entries q(Re h_i), q(Im h_i).
struct CoveringWitness {
  DirectionKey key;                        // primitive direction of z
  std::vector<std::int64_t> numerators;    // z = numerators / 2^{ell+1}
  int ell = 0;

  /// ||z||^2 and ||h_bar - z||^2 in floating point.
  double z_norm2() const;
  double distance2(const ChannelVector& h_bar) const;
};

/// Requires ||h_bar|| = 1 +- 1e-9 and ell_min(t) <= ell <= kMaxLayer.
/// Throws std::logic_error if z violates 0 < ||z|| <= 1 (cannot happen when
/// the preconditions hold).
CoveringWitness covering_witness(const ChannelVector& h_bar, int ell);

/// CSV with header `index,layer,c1,...,c{2t}`.
void export_codebook_csv(std::ostream& out, const CodebookStream& stream);
/// Parses and validates an exported codebook: consecutive indices, correct
/// layers, primitive keys, strictly ascending order inside each layer.
std::vector<DirectionKey> import_codebook_csv(std::istream& in);

}  // namespace vlcq
