#include "vlcq/codebook.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace vlcq {

namespace {

void check_ell(int ell) {
  if (ell < 0 || ell > kMaxLayer)
    throw std::domain_error("layer must be in [0, " + std::to_string(kMaxLayer) + "], got " +
                            std::to_string(ell));
}

constexpr std::array<int, 18> kSmallPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23,
                                              29, 31, 37, 41, 43, 47, 53, 59, 61};

using Wide = __int128;

// Integer points x in Z^dim (zero included) with |x_i| <= max_abs and
// ||x||^2 <= radius2, by convolving the one-dimensional square counts.
Wide count_points(std::int64_t radius2, std::int64_t max_abs, int dim) {
  if (max_abs <= 0 || radius2 <= 0) return 1;
  const auto n = static_cast<std::size_t>(radius2 + 1);
  std::vector<Wide> acc(n, 0), next(n, 0);
  acc[0] = 1;
  for (int d = 0; d < dim; ++d) {
    std::fill(next.begin(), next.end(), Wide{0});
    for (std::size_t s = 0; s < n; ++s) {
      if (acc[s] == 0) continue;
      const std::int64_t lim =
          std::min(max_abs, detail::isqrt(radius2 - static_cast<std::int64_t>(s)));
      for (std::int64_t v = -lim; v <= lim; ++v) next[s + static_cast<std::size_t>(v * v)] += acc[s];
    }
    acc.swap(next);
  }
  Wide total = 0;
  for (Wide v : acc) total += v;
  return total;
}

std::vector<int> mobius_table(std::int64_t n) {
  std::vector<int> mu(static_cast<std::size_t>(n + 1), 1);
  std::vector<bool> composite(static_cast<std::size_t>(n + 1), false);
  for (std::int64_t p = 2; p <= n; ++p) {
    if (composite[static_cast<std::size_t>(p)]) continue;
    for (std::int64_t k = p; k <= n; k += p) {
      if (k > p) composite[static_cast<std::size_t>(k)] = true;
      mu[static_cast<std::size_t>(k)] = -mu[static_cast<std::size_t>(k)];
    }
    for (std::int64_t k = p * p; k <= n; k += p * p) mu[static_cast<std::size_t>(k)] = 0;
  }
  return mu;
}

}  // namespace

namespace detail {

std::uint64_t small_prime_mask(std::int64_t v) {
  if (v < 0) v = -v;
  if (v == 0) return ~std::uint64_t{0};
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < kSmallPrimes.size(); ++i)
    if (v % kSmallPrimes[i] == 0) m |= std::uint64_t{1} << i;
  return m;
}

void check_layer_args(int ell, int t) {
  check_ell(ell);
  if (t < 1) throw std::domain_error("t must be >= 1");
}

}  // namespace detail

std::vector<double> grid_values(int ell) {
  check_ell(ell);
  const std::int64_t k = std::int64_t{1} << (ell + 1);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(2 * k - 1));
  for (std::int64_t j = -(k - 1); j <= k - 1; ++j) out.push_back(std::ldexp(static_cast<double>(j), -(ell + 1)));
  return out;
}

std::int64_t scalar_quantize_numerator(double x, int ell) {
  check_ell(ell);
  if (!(x >= -1.0 && x <= 1.0)) throw std::domain_error("scalar quantizer input must lie in [-1, 1]");
  const std::int64_t k = std::int64_t{1} << (ell + 1);
  const double scaled = std::ldexp(x, ell + 1);  // exact
  if (scaled <= -1.0) return std::max<std::int64_t>(1 - k, static_cast<std::int64_t>(std::ceil(scaled)));
  if (scaled <= 1.0) return 0;
  return static_cast<std::int64_t>(std::ceil(scaled)) - 1;
}

double scalar_quantize(double x, int ell) {
  return std::ldexp(static_cast<double>(scalar_quantize_numerator(x, ell)), -(ell + 1));
}

int layer_of(std::span<const std::int64_t> p) {
  std::int64_t n2 = 0;
  std::int64_t maxabs = 0;
  for (std::int64_t c : p) {
    n2 += c * c;
    maxabs = std::max(maxabs, c < 0 ? -c : c);
  }
  if (n2 == 0) throw std::domain_error("layer_of: zero vector");
  for (int ell = 0; ell < 62 / 2; ++ell) {
    const std::int64_t r = std::int64_t{1} << (ell + 1);
    if (n2 <= r * r && maxabs <= r - 1) return ell;
  }
  throw std::domain_error("layer_of: coordinates too large");
}

int layer_of(const DirectionKey& p) { return layer_of(p.coords()); }

int ell_min(int t) {
  if (t < 1) throw std::domain_error("t must be >= 1");
  int ell = 0;
  while (2 * static_cast<std::int64_t>(t) >= (std::int64_t{1} << (2 * (ell + 1)))) ++ell;
  return ell;
}

std::vector<Complex> unit_vector_of(std::span<const std::int64_t> p) {
  const DirectionKey key = DirectionKey::canonical(p);
  const double n = std::sqrt(static_cast<double>(key.norm2()));
  std::vector<Complex> out(static_cast<std::size_t>(key.t()));
  const auto c = key.coords();
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = Complex(static_cast<double>(c[2 * i]) / n, static_cast<double>(c[2 * i + 1]) / n);
  return out;
}

std::vector<DirectionKey> enumerate_layer(int ell, int t) {
  std::vector<DirectionKey> out;
  for_each_in_layer(ell, t, [&](std::span<const std::int64_t> p, std::int64_t) {
    out.push_back(DirectionKey::from_primitive({p.begin(), p.end()}));
    return true;
  });
  return out;
}

std::vector<std::uint64_t> count_layer_sizes(int t, int ell_max) {
  detail::check_layer_args(ell_max, t);
  std::vector<std::uint64_t> sizes;
  const int dim = 2 * t;
  for (int ell = 0; ell <= ell_max; ++ell) {
    const std::int64_t r = std::int64_t{1} << (ell + 1);
    const std::int64_t radius2 = r * r;
    const std::int64_t max_abs = r - 1;
    const auto mu = mobius_table(max_abs);
    Wide total = 0;
    for (std::int64_t d = 1; d <= max_abs; ++d) {
      const int m = mu[static_cast<std::size_t>(d)];
      if (m == 0) continue;
      total += m * (count_points(radius2 / (d * d), max_abs / d, dim) - 1);
    }
    if (total < 0 || total > static_cast<Wide>(std::numeric_limits<std::int64_t>::max()))
      throw std::overflow_error("codebook layer size exceeds 2^63");
    sizes.push_back(static_cast<std::uint64_t>(total));
  }
  return sizes;
}

// --- CodebookStream --------------------------------------------------------

CodebookStream::CodebookStream(int t, int ell_max, std::size_t cache_budget_bytes)
    : t_(t), ell_max_(ell_max), sizes_(count_layer_sizes(t, ell_max)) {
  const std::size_t per_entry = static_cast<std::size_t>(2 * t) * sizeof(std::int16_t) + sizeof(std::int32_t);
  std::size_t used = 0;
  for (int ell = 0; ell <= ell_max; ++ell) {
    const std::uint64_t count = sizes_[static_cast<std::size_t>(ell)] - layer_begin(ell);
    const bool fits = count <= (cache_budget_bytes - used) / per_entry;
    // Once one layer streams, later (bigger) layers stream too.
    const bool ok = fits && (ell == 0 || cacheable_.back());
    cacheable_.push_back(ok);
    if (ok) used += static_cast<std::size_t>(count) * per_entry;
  }
  once_ = std::make_unique<std::once_flag[]>(static_cast<std::size_t>(ell_max + 1));
  layers_.resize(static_cast<std::size_t>(ell_max + 1));
  for_each_in_layer(0, t, [&](std::span<const std::int64_t> p, std::int64_t) {
    first_ = DirectionKey::from_primitive({p.begin(), p.end()});
    return false;
  });
}

CodebookStream::~CodebookStream() = default;

const CodebookStream::Layer& CodebookStream::cached_layer(int ell) const {
  const auto idx = static_cast<std::size_t>(ell);
  std::call_once(once_[idx], [&] {
    auto layer = std::make_unique<Layer>();
    const std::uint64_t expected = sizes_[idx] - layer_begin(ell);
    layer->coords.reserve(static_cast<std::size_t>(expected) * static_cast<std::size_t>(2 * t_));
    layer->norm2.reserve(static_cast<std::size_t>(expected));
    for_each_in_layer(ell, t_, [&](std::span<const std::int64_t> p, std::int64_t n2) {
      for (std::int64_t c : p) layer->coords.push_back(static_cast<std::int16_t>(c));
      layer->norm2.push_back(static_cast<std::int32_t>(n2));
      return true;
    });
    if (layer->norm2.size() != expected)
      throw std::logic_error("layer enumeration disagrees with lattice count at layer " +
                             std::to_string(ell));
    layers_[idx] = std::move(layer);
  });
  return *layers_[idx];
}

DirectionKey CodebookStream::at(std::uint64_t n) const {
  if (n >= size()) throw std::out_of_range("codebook index " + std::to_string(n) + " beyond size " +
                                           std::to_string(size()));
  const int ell = static_cast<int>(std::upper_bound(sizes_.begin(), sizes_.end(), n) - sizes_.begin());
  const std::uint64_t offset = n - layer_begin(ell);
  const std::size_t dim = static_cast<std::size_t>(2 * t_);
  if (cacheable_[static_cast<std::size_t>(ell)]) {
    const Layer& layer = cached_layer(ell);
    std::vector<std::int64_t> c(dim);
    for (std::size_t i = 0; i < dim; ++i) c[i] = layer.coords[static_cast<std::size_t>(offset) * dim + i];
    return DirectionKey::from_primitive(std::move(c));
  }
  std::uint64_t seen = 0;
  DirectionKey out;
  for_each_in_layer(ell, t_, [&](std::span<const std::int64_t> p, std::int64_t) {
    if (seen++ == offset) {
      out = DirectionKey::from_primitive({p.begin(), p.end()});
      return false;
    }
    return true;
  });
  return out;
}

std::vector<DirectionKey> CodebookStream::prefix(std::uint64_t n) const {
  std::vector<DirectionKey> out;
  if (n == 0) return out;
  out.reserve(static_cast<std::size_t>(std::min(n, size())));
  for_each([&](std::uint64_t, std::span<const std::int64_t> p, std::int64_t) {
    out.push_back(DirectionKey::from_primitive({p.begin(), p.end()}));
    return out.size() < n;
  });
  return out;
}

std::optional<std::uint64_t> CodebookStream::first_hit(const ChannelVector& h, double alpha,
                                                       std::uint64_t from) const {
  if (h.t() != t_) throw std::domain_error("channel dimension does not match codebook");
  const Complex* hp = h.entries.data();
  const std::size_t dim = static_cast<std::size_t>(2 * t_);
  for (int ell = 0; ell <= ell_max_; ++ell) {
    const std::uint64_t begin = layer_begin(ell);
    const std::uint64_t end = sizes_[static_cast<std::size_t>(ell)];
    if (from >= end) continue;
    const std::uint64_t skip = from > begin ? from - begin : 0;
    if (cacheable_[static_cast<std::size_t>(ell)]) {
      const Layer& layer = cached_layer(ell);
      const std::size_t count = layer.norm2.size();
      for (std::size_t i = static_cast<std::size_t>(skip); i < count; ++i) {
        if (gain_raw(layer.coords.data() + i * dim, layer.norm2[i], hp, t_) >= alpha) return begin + i;
      }
    } else {
      std::uint64_t idx = 0;
      std::optional<std::uint64_t> hit;
      for_each_in_layer(ell, t_, [&](std::span<const std::int64_t> p, std::int64_t n2) {
        if (idx >= skip && gain_raw(p.data(), n2, hp, t_) >= alpha) {
          hit = begin + idx;
          return false;
        }
        ++idx;
        return true;
      });
      if (hit) return hit;
    }
  }
  return std::nullopt;
}

// --- covering witness ------------------------------------------------------

double CoveringWitness::z_norm2() const {
  double s = 0.0;
  for (std::int64_t j : numerators) {
    const double z = std::ldexp(static_cast<double>(j), -(ell + 1));
    s += z * z;
  }
  return s;
}

double CoveringWitness::distance2(const ChannelVector& h_bar) const {
  double s = 0.0;
  for (std::size_t i = 0; i < h_bar.entries.size(); ++i) {
    const double zr = std::ldexp(static_cast<double>(numerators[2 * i]), -(ell + 1));
    const double zi = std::ldexp(static_cast<double>(numerators[2 * i + 1]), -(ell + 1));
    s += std::norm(h_bar.entries[i] - Complex(zr, zi));
  }
  return s;
}

CoveringWitness covering_witness(const ChannelVector& h_bar, int ell) {
  const int t = h_bar.t();
  if (t < 1) throw std::domain_error("empty channel vector");
  check_ell(ell);
  if (ell < ell_min(t))
    throw std::domain_error("covering needs ell >= " + std::to_string(ell_min(t)) + " for t=" +
                            std::to_string(t));
  if (std::abs(std::sqrt(h_bar.norm2()) - 1.0) > 1e-9)
    throw std::domain_error("covering_witness needs a unit-norm channel");

  CoveringWitness w;
  w.ell = ell;
  w.numerators.reserve(static_cast<std::size_t>(2 * t));
  auto clamp = [](double v) { return std::clamp(v, -1.0, 1.0); };
  for (const Complex& e : h_bar.entries) {
    w.numerators.push_back(scalar_quantize_numerator(clamp(e.real()), ell));
    w.numerators.push_back(scalar_quantize_numerator(clamp(e.imag()), ell));
  }
  std::int64_t n2 = 0;
  for (std::int64_t j : w.numerators) n2 += j * j;
  const std::int64_t r = std::int64_t{1} << (ell + 1);
  if (n2 == 0 || n2 > r * r)
    throw std::logic_error("covering witness left the unit ball (||j||^2 = " + std::to_string(n2) + ")");
  w.key = DirectionKey::canonical(w.numerators);
  return w;
}

// --- CSV -------------------------------------------------------------------

void export_codebook_csv(std::ostream& out, const CodebookStream& stream) {
  const int dim = 2 * stream.t();
  out << "index,layer";
  for (int c = 1; c <= dim; ++c) out << ",c" << c;
  out << '\n';
  int ell = 0;
  stream.for_each([&](std::uint64_t n, std::span<const std::int64_t> p, std::int64_t) {
    while (n >= stream.layer_sizes()[static_cast<std::size_t>(ell)]) ++ell;
    out << n << ',' << ell;
    for (std::int64_t c : p) out << ',' << c;
    out << '\n';
    return true;
  });
}

std::vector<DirectionKey> import_codebook_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("codebook CSV: missing header");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 4 || header[0] != "index" || header[1] != "layer" || header.size() % 2 != 0)
    throw std::runtime_error("codebook CSV: header must be index,layer,c1..c2t");
  const std::size_t dim = header.size() - 2;

  std::vector<DirectionKey> out;
  int prev_layer = -1;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::int64_t> vals;
    while (std::getline(ss, cell, ',')) {
      std::size_t pos = 0;
      long long v = 0;
      try {
        v = std::stoll(cell, &pos);
      } catch (const std::exception&) {
        pos = std::string::npos;
      }
      if (pos != cell.size()) throw std::runtime_error("codebook CSV line " + std::to_string(line_no) + ": bad integer '" + cell + "'");
      vals.push_back(v);
    }
    const auto fail = [&](const std::string& why) {
      throw std::runtime_error("codebook CSV line " + std::to_string(line_no) + ": " + why);
    };
    if (vals.size() != dim + 2) fail("wrong column count");
    if (vals[0] != static_cast<std::int64_t>(out.size())) fail("index out of sequence");
    std::vector<std::int64_t> coords(vals.begin() + 2, vals.end());
    if (gcd_of(coords) != 1) fail("direction is zero or not primitive");
    const int layer = layer_of(coords);
    if (layer != vals[1]) fail("layer column disagrees with layer_of");
    auto key = DirectionKey::from_primitive(std::move(coords));
    if (layer < prev_layer) fail("layers out of order");
    if (layer == prev_layer && !(out.back() < key)) fail("not ascending inside layer");
    prev_layer = layer;
    out.push_back(std::move(key));
  }
  return out;
}

}  // namespace vlcq
