#include "vlcq/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "vlcq/channel.hpp"
#include "vlcq/codebook.hpp"
#include "vlcq/core_math.hpp"
#include "vlcq/quantizer.hpp"
#include "vlcq/simulate.hpp"
#include "vlcq/toy_sources.hpp"

namespace vlcq {

Ell0Conditions ell0_conditions(int t, int ell) {
  if (t < 1) throw std::domain_error("t must be >= 1");
  if (ell < 0 || ell > 60) throw std::domain_error("ell out of range");
  Ell0Conditions c;
  const auto tt = static_cast<std::int64_t>(t);
  c.witness_nonzero = ell + 1 >= 31 || 2 * tt < (std::int64_t{1} << (2 * (ell + 1)));
  c.margin_positive = (std::int64_t{1} << ell) > 6 * tt;
  const double step = 1.0 + 3.0 * t / std::ldexp(1.0, ell);
  double sum = 0.0;
  double pw = 1.0;
  for (int j = 0; j < t; ++j) {
    sum += pw;
    pw *= step;
  }
  c.bracket_small = sum < t + 1.0;
  return c;
}

int find_ell0(int t) {
  for (int ell = 1; ell <= 60; ++ell)
    if (ell0_conditions(t, ell).all()) return ell;
  throw std::domain_error("no ell0 below 60 for t=" + std::to_string(t));
}

double tail_constant(int t) {
  if (t < 1) throw std::domain_error("t must be >= 1");
  return 3.0 * (t + 1) / t;
}

double tail_bound(int t, double alpha, int ell) {
  const int ell0 = find_ell0(t);
  if (ell < ell0)
    throw std::domain_error("tail bound holds for ell >= " + std::to_string(ell0) + " only");
  if (!(alpha >= 0.0)) throw std::domain_error("alpha must be >= 0");
  return tail_constant(t) * std::pow(alpha, t) / std::ldexp(1.0, ell);
}

BoundReport rate_upper_bound(int t, double alpha, std::span<const std::uint64_t> layer_sizes) {
  BoundReport r;
  r.ell0 = find_ell0(t);
  r.tail_constant = tail_constant(t);
  if (!(alpha >= 0.0)) throw std::domain_error("alpha must be >= 0");
  const auto need = static_cast<std::size_t>(r.ell0 + 2);
  if (layer_sizes.size() < need)
    throw std::domain_error("rate bound needs layer sizes through layer " + std::to_string(r.ell0 + 1));
  const auto floor_log2 = [](std::uint64_t v) { return static_cast<double>(std::bit_width(v) - 1); };

  const std::uint64_t head_size = layer_sizes[static_cast<std::size_t>(r.ell0)];
  r.head_term = alpha * floor_log2(head_size) * (static_cast<double>(head_size) - 2.0);
  const double scale = r.tail_constant * std::pow(alpha, t);
  double body = 0.0;
  for (std::size_t ell = static_cast<std::size_t>(r.ell0); ell + 1 < layer_sizes.size(); ++ell) {
    const double term = scale * floor_log2(layer_sizes[ell + 1]) / std::ldexp(1.0, static_cast<int>(ell));
    r.per_layer_terms.push_back(term);
    body += term;
  }
  // sum_{l >= L} 2t(l+3) / 2^l = 2t (L+4) 2^{1-L}
  const int last = static_cast<int>(layer_sizes.size()) - 1;
  r.capped_tail = scale * 2.0 * t * (last + 4) * std::ldexp(1.0, 1 - last);
  r.rate_bound = r.head_term + body + r.capped_tail;
  return r;
}

double converse_floor(double alpha, double rate) {
  if (!(rate >= 0.0)) throw std::domain_error("rate must be >= 0");
  return std::max(0.0, out_open_closed(alpha) - rate);
}

double fit_decay_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw std::domain_error("slope fit needs at least 3 points");
  double sx = 0, sy = 0;
  for (const auto& [p, v] : points) {
    if (!(p > 0.0) || !(v > 0.0)) throw std::domain_error("slope fit needs positive P and values");
    sx += std::log(p);
    sy += std::log(v);
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& [p, v] : points) {
    const double dx = std::log(p) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(v) - my);
  }
  if (sxx == 0.0) throw std::domain_error("slope fit needs distinct P values");
  return sxy / sxx;
}

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

// --- verification battery ---------------------------------------------------

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

CheckResult check(std::string name, double margin, std::string detail) {
  return CheckResult{std::move(name), margin >= 0.0, margin, std::move(detail)};
}

// Independent stream ids per check so checks do not share draws.
enum StreamId : std::uint64_t {
  kStreamScalar = 1u << 20,
  kStreamCovering,
  kStreamProp1,
  kStreamInside,
  kStreamOutside,
  kStreamCells,
  kStreamRefine,
  kStreamToy,
};

ChannelVector random_unit(RandomStream& rs, int t) { return sample_channel(rs, t).normalized(); }

CheckResult check_quadrature() {
  double worst = 0.0;
  for (int t = 1; t <= 5; ++t) {
    for (double a : {0.01, 0.1, 1.0, 5.0}) {
      const double lg = std::lgamma(static_cast<double>(t));
      auto density = [&](double x) { return std::exp((t - 1) * std::log(x) - x - lg); };
      const double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(density, 0.0, a, 15, 1e-14);
      worst = std::max(worst, std::abs(q - out_full_closed(t, a)));
    }
  }
  return check("closed_form_vs_quadrature", 1e-10 - worst, "max |closed - quadrature| = " + fmt(worst));
}

CheckResult check_closed_chain() {
  double margin = std::numeric_limits<double>::infinity();
  for (int t = 2; t <= 6; ++t) {
    for (double a : {1e-3, 0.01, 0.1, 0.5, 1.0, 3.0}) {
      const double f = out_full_closed(t, a), o = out_open_closed(a);
      margin = std::min({margin, o - f, a - o});
      if (!(f < o && o < a)) margin = std::min(margin, -1.0);
    }
  }
  double scaling = 0.0;
  for (int t = 1; t <= 5; ++t) {
    const double a = 1e-3;
    const double ratio = out_full_closed(t, a) / std::pow(a, t) * std::tgamma(t + 1.0);
    scaling = std::max(scaling, std::abs(ratio - 1.0));
  }
  margin = std::min(margin, 0.01 - scaling);
  return check("closed_form_ordering_and_scaling", margin,
               "OUT(Full) < OUT(Open) < alpha; max |t! OUT(Full)/alpha^t - 1| at 1e-3 = " + fmt(scaling));
}

CheckResult check_scalar_quantizer(std::uint64_t seed, std::uint64_t samples) {
  RandomStream rs(seed, kStreamScalar);
  double margin = std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < samples; ++i) {
    const double x = 2.0 * rs.uniform() - 1.0;
    for (int ell = 0; ell <= 6; ++ell) {
      const double q = scalar_quantize(x, ell);
      const double eps = std::ldexp(1.0, -(ell + 1));
      margin = std::min({margin, std::abs(x) - std::abs(q), eps - std::abs(q - x), std::abs(q) + eps - std::abs(x)});
    }
  }
  return check("scalar_quantizer_bounds", margin, "|q|<=|x|, |q-x|<=eps, |x|<=|q|+eps over " + std::to_string(samples) + " draws x 7 layers");
}

CheckResult check_small_codebook_oracle() {
  // t = 1: normalize every grid point of S_l x S_l in the unit disk, dedup,
  // and compare with the streamed directions.
  double worst = 0.0;
  bool ok = true;
  for (int ell = 0; ell <= 2; ++ell) {
    std::vector<std::pair<double, double>> brute;
    const auto grid = grid_values(ell);
    for (double re : grid)
      for (double im : grid) {
        const double n2 = re * re + im * im;
        if (n2 == 0.0 || n2 > 1.0) continue;
        const double n = std::sqrt(n2);
        brute.emplace_back(re / n, im / n);
      }
    std::sort(brute.begin(), brute.end());
    std::vector<std::pair<double, double>> uniq;
    for (const auto& v : brute) {
      const bool dup = std::any_of(uniq.begin(), uniq.end(), [&](const auto& u) {
        return std::abs(u.first - v.first) < 1e-12 && std::abs(u.second - v.second) < 1e-12;
      });
      if (!dup) uniq.push_back(v);
    }
    const CodebookStream stream(1, ell);
    std::vector<std::pair<double, double>> streamed;
    stream.for_each([&](std::uint64_t, std::span<const std::int64_t> p, std::int64_t) {
      const auto u = unit_vector_of(p);
      streamed.emplace_back(u[0].real(), u[0].imag());
      return true;
    });
    if (streamed.size() != uniq.size()) {
      ok = false;
      continue;
    }
    for (const auto& s : streamed) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& u : uniq) best = std::min(best, std::hypot(u.first - s.first, u.second - s.second));
      worst = std::max(worst, best);
    }
  }
  return check("codebook_small_instance_oracle", ok ? 1e-12 - worst : -1.0,
               "t=1, layers 0..2 vs brute-force normalize-and-dedup; worst distance " + fmt(worst));
}

CheckResult check_layer_sizes(int t, int ell_max) {
  const auto sizes = count_layer_sizes(t, ell_max);
  double margin = std::numeric_limits<double>::infinity();
  for (int ell = 0; ell <= ell_max; ++ell) {
    const double cap = std::ldexp(1.0, 2 * t * (ell + 2));
    margin = std::min(margin, std::log2(cap) - std::log2(static_cast<double>(sizes[static_cast<std::size_t>(ell)])));
  }
  // enumeration must agree with the Mobius count where a walk is cheap
  std::string detail = "|Y_l| <= 2^{2t(l+2)} (log2 margin)";
  for (int ell = 0; ell <= ell_max; ++ell) {
    if (std::pow(2.0 * std::ldexp(1.0, ell + 1), 2 * t) > 2e7) break;
    const std::uint64_t walked = for_each_in_layer(ell, t, [](auto, auto) { return true; });
    const std::uint64_t counted = sizes[static_cast<std::size_t>(ell)] - (ell ? sizes[static_cast<std::size_t>(ell - 1)] : 0);
    if (walked != counted) {
      margin = -1.0;
      detail += "; enumeration/count mismatch at layer " + std::to_string(ell);
    }
  }
  return check("layer_size_cap", margin, detail);
}

CheckResult check_covering(int t_main, std::uint64_t seed) {
  RandomStream rs(seed, kStreamCovering);
  double gain_margin = std::numeric_limits<double>::infinity();
  double norm_margin = std::numeric_limits<double>::infinity();
  std::uint64_t count = 0;
  std::vector<int> ts = {1};
  if (t_main != 1) ts.push_back(t_main);
  for (int t : ts) {
    for (int ell = ell_min(t); ell <= 6; ++ell) {
      const double eps = std::ldexp(1.0, -(ell + 1));
      const double bound = 1.0 - 2.0 * t / std::ldexp(1.0, ell);
      for (int i = 0; i < 10000; ++i) {
        const ChannelVector hb = random_unit(rs, t);
        const CoveringWitness w = covering_witness(hb, ell);
        gain_margin = std::min(gain_margin, gain(w.key, hb) - bound);
        const double z2 = w.z_norm2();
        norm_margin = std::min({norm_margin, z2 - (1.0 - 2.0 * std::sqrt(2.0 * t) * eps), 1.0 - z2,
                                2.0 * t * eps * eps - w.distance2(hb)});
        ++count;
      }
    }
  }
  // a strict inequality: zero margin is a failure
  const double m = std::min(gain_margin > 0 ? gain_margin : -1.0, norm_margin + 1e-12);
  return check("covering_witness", m,
               std::to_string(count) + " witnesses; min gain - (1 - 2t/2^l) = " + fmt(gain_margin) +
                   "; min norm-bound slack = " + fmt(norm_margin));
}

CheckResult check_encoder_equivalence(int t, double alpha, std::uint64_t seed, std::uint64_t samples) {
  std::uint64_t mismatches = 0;
  std::uint64_t outages = 0;
  RandomStream rs(seed, kStreamProp1);
  for (std::uint64_t n : {std::uint64_t{8}, std::uint64_t{80}}) {
    int ell = 0;
    while (count_layer_sizes(t, ell).back() < n) ++ell;
    const CodebookStream stream(t, ell);
    const auto book = stream.prefix(n);
    for (double a : {alpha, 1.0}) {
      for (std::uint64_t i = 0; i < samples; ++i) {
        const ChannelVector h = sample_channel(rs, t);
        const std::size_t best = encode_flq_standard(h, book);
        const bool argmax_out = gain(book[best], h) < a;
        const bool seq_out = encode_flq_sequential(h, book, a).outage;
        double max_gain = 0.0;
        for (const auto& d : book) max_gain = std::max(max_gain, gain(d, h));
        const bool direct = max_gain < a;
        mismatches += (argmax_out != seq_out || seq_out != direct) ? 1 : 0;
        outages += direct ? 1 : 0;
      }
    }
  }
  return check("encoder_equivalence", mismatches == 0 ? 0.0 : -static_cast<double>(mismatches),
               std::to_string(mismatches) + " mismatches; " + std::to_string(outages) + " outage samples");
}

CheckResult check_inclusions(int t, double alpha, int ell_max, std::uint64_t seed, std::uint64_t samples,
                             CheckResult& outside) {
  // (inside) ||h||^2 < alpha always lands in cell 0 with outage.
  const CodebookStream stream(t, ell_max);
  RandomStream rs(seed, kStreamInside);
  std::uint64_t inside = 0, inside_bad = 0;
  for (double a : {alpha, 1.0}) {
    for (std::uint64_t i = 0; i < samples; ++i) {
      const ChannelVector h = sample_channel(rs, t);
      if (!(h.norm2() < a)) continue;
      ++inside;
      const auto o = encode_vlq(h, stream, a);
      if (!(o.outage && o.index == 0 && !o.truncated)) ++inside_bad;
    }
  }
  // (outside) ||h||^2 > alpha (1 + 3t/2^l) resolves inside layer l, l = ell0.
  const int ell0 = find_ell0(t);
  const auto sizes0 = count_layer_sizes(t, ell0);
  if (static_cast<double>(sizes0.back()) > 5e7) {
    outside = CheckResult{"outer_band_inclusion", true, 0.0,
                          "skipped: layer " + std::to_string(ell0) + " too large to scan"};
  } else {
    const CodebookStream s0(t, ell0);
    RandomStream ro(seed, kStreamOutside);
    std::uint64_t hits = 0, bad = 0;
    for (double a : {alpha, 1.0}) {
      const double edge = a * (1.0 + 3.0 * t / std::ldexp(1.0, ell0));
      for (std::uint64_t i = 0; i < samples; ++i) {
        const ChannelVector h = sample_channel(ro, t);
        if (!(h.norm2() > edge)) continue;
        ++hits;
        const auto o = encode_vlq(h, s0, a);
        if (o.outage || o.index >= s0.size()) ++bad;
      }
    }
    outside = CheckResult{"outer_band_inclusion", bad == 0, -static_cast<double>(bad),
                          std::to_string(hits) + " samples beyond the band at l0=" + std::to_string(ell0) +
                              "; " + std::to_string(bad) + " unresolved"};
  }
  return CheckResult{"inner_band_inclusion", inside_bad == 0, -static_cast<double>(inside_bad),
                     std::to_string(inside) + " samples with ||h||^2 < alpha; " + std::to_string(inside_bad) +
                         " not in cell 0"};
}

CheckResult check_cells_and_refinement(int t, double alpha, int ell_max, std::uint64_t seed,
                                       std::uint64_t samples) {
  const CodebookStream full(t, ell_max);
  const std::uint64_t cell_samples = std::min<std::uint64_t>(samples, 2000);
  RandomStream rs(seed, kStreamCells);
  std::uint64_t cells = 0;
  for (std::uint64_t i = 0; i < cell_samples; ++i) {
    const ChannelVector h = sample_channel(rs, t);
    encode_vlq(h, full, alpha, EncodeOptions{true});
    ++cells;
  }
  std::uint64_t changed = 0, compared = 0;
  if (ell_max >= 1) {
    const CodebookStream coarse(t, ell_max - 1);
    RandomStream rr(seed, kStreamRefine);
    for (std::uint64_t i = 0; i < samples; ++i) {
      const ChannelVector h = sample_channel(rr, t);
      const auto a = encode_vlq(h, coarse, alpha);
      if (a.truncated) continue;
      ++compared;
      if (encode_vlq(h, full, alpha).index != a.index) ++changed;
    }
  }
  return CheckResult{"cell_semantics_and_refinement", changed == 0, -static_cast<double>(changed),
                     std::to_string(cells) + " cells re-verified; " + std::to_string(changed) + " of " +
                         std::to_string(compared) + " indices changed when adding a layer"};
}

std::vector<CheckResult> check_monte_carlo(const VerifyConfig& c) {
  std::vector<CheckResult> out;
  SimConfig base;
  base.params = SystemParams::make(c.t, c.rho, c.power);
  base.ell_max = c.ell_max;
  base.n_samples = c.samples;
  base.seed = c.seed;
  base.shards = c.shards;

  std::vector<SimConfig> cfgs;
  for (Mode m : {Mode::kVlq, Mode::kFlq, Mode::kPrecoding, Mode::kOpen, Mode::kFull}) {
    SimConfig s = base;
    s.mode = m;
    cfgs.push_back(s);
  }
  const auto rows = sweep(cfgs);
  for (const auto& r : rows)
    if (!r.ok) throw std::runtime_error("verification simulation failed: " + r.error);

  const SimResult& vlq = rows[0].result;
  const double gap = std::abs(vlq.out_hat - vlq.closed_full);
  out.push_back(check("mc_achievability", 3 * vlq.out_se + vlq.truncation_frac - gap,
                      "|out_hat - OUT(Full)| = " + fmt(gap) + ", 3se + trunc = " +
                          fmt(3 * vlq.out_se + vlq.truncation_frac)));

  double conv = std::numeric_limits<double>::infinity();
  std::string detail;
  // Beamforming quantizers only; a rate-0 precoder already beats OUT(Open).
  for (std::size_t i : {0u, 1u, 3u}) {
    const SimResult& r = rows[i].result;
    const double m = r.out_hat + r.rate_bstar_hat - (r.closed_open - 3 * (r.out_se + r.rate_se));
    conv = std::min(conv, m);
    detail += rows[i].config.mode_name() + ":" + fmt(m) + " ";
  }
  out.push_back(check("mc_converse_floor", conv, "out + rate - (OUT(Open) - 3se) per mode: " + detail));

  const SimResult& full = rows[4].result;
  const SimResult& open = rows[3].result;
  const double full_gap = 3 * full.out_se - std::abs(full.out_hat - full.closed_full);
  const double open_gap = 3 * open.out_se - std::abs(open.out_hat - open.closed_open);
  out.push_back(check("mc_closed_form_baselines", std::min(full_gap, open_gap),
                      "full and open estimates within 3se of their closed forms"));
  return out;
}

CheckResult check_kraft() {
  const auto pf = kraft_sum(LengthScheme::kPrefixFree, 1000000);
  const auto bs = kraft_sum(LengthScheme::kBstar, 7);
  const double limit = std::numbers::pi * std::numbers::pi / 12.0;
  const double m = std::min(1.0 - (pf.partial + pf.tail_bound), bs.partial - 1.0);
  return check("kraft_sums", std::min(m, limit + 1e-12 - pf.partial),
               "prefix-free partial+tail = " + fmt(pf.partial + pf.tail_bound) + "; b* partial(7) = " +
                   fmt(bs.partial));
}

CheckResult check_bounds(int t) {
  double margin = std::numeric_limits<double>::infinity();
  const int ell0 = find_ell0(t);
  for (int ell = ell0; ell < ell0 + 6; ++ell) {
    const double a = tail_bound(t, 0.1, ell), b = tail_bound(t, 0.1, ell + 1);
    margin = std::min(margin, 1e-15 - std::abs(b - a / 2));
  }
  const auto sizes = count_layer_sizes(t, ell0 + 1);
  double prev = -1.0;
  for (double p : {1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 1000.0}) {
    const double bound = rate_upper_bound(t, alpha_of(1.0, p), sizes).rate_bound;
    if (prev >= 0.0 && bound > prev) margin = -1.0;
    prev = bound;
  }
  return check("bound_monotonicity", margin, "tail bound halves per layer; rate bound nonincreasing in P");
}

CheckResult check_toy(std::uint64_t seed, std::uint64_t samples) {
  const auto br = toy_vlq_rate(1000000);
  double margin = 1e-4 - br.width();
  if (!std::isfinite(br.upper)) margin = -1.0;
  for (std::uint64_t n = 1; n <= 1000000; n *= 10) margin = std::min(margin, toy_flq_distortion(n) > 0 ? margin : -1.0);
  RandomStream rs(seed, kStreamToy);
  std::uint64_t nonzero = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const double x = rs.uniform();
    nonzero += static_cast<std::uint64_t>(example2_distortion(x, example2_encode(x)));
  }
  if (nonzero) margin = -static_cast<double>(nonzero);
  return check("toy_dichotomy", margin,
               "rate bracket [" + fmt(br.lower) + ", " + fmt(br.upper) + "]; FLQ distortion > 0; " +
                   std::to_string(nonzero) + " nonzero-distortion samples of " + std::to_string(samples));
}

}  // namespace

VerifyReport run_verification(const VerifyConfig& c) {
  if (c.t < 1) throw std::invalid_argument("t must be >= 1");
  if (c.samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (c.ell_max < 0 || c.ell_max > kMaxLayer) throw std::invalid_argument("bad ell_max");
  const double alpha = alpha_of(c.rho, c.power);

  VerifyReport report;
  report.config = c;
  auto& out = report.checks;
  out.push_back(check_quadrature());
  out.push_back(check_closed_chain());
  out.push_back(check_scalar_quantizer(c.seed, c.samples));
  out.push_back(check_small_codebook_oracle());
  out.push_back(check_layer_sizes(c.t, c.ell_max));
  out.push_back(check_covering(c.t, c.seed));
  out.push_back(check_encoder_equivalence(c.t, alpha, c.seed, c.samples));
  CheckResult outer;
  out.push_back(check_inclusions(c.t, alpha, c.ell_max, c.seed, c.samples, outer));
  out.push_back(outer);
  out.push_back(check_cells_and_refinement(c.t, alpha, c.ell_max, c.seed, c.samples));
  for (auto& r : check_monte_carlo(c)) out.push_back(std::move(r));
  out.push_back(check_kraft());
  out.push_back(check_bounds(c.t));
  out.push_back(check_toy(c.seed, c.samples));
  return report;
}

}  // namespace vlcq
