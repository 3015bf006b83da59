#include "vlcq/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <new>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "vlcq/quantizer.hpp"

namespace vlcq {

namespace {

using U128 = unsigned __int128;

struct Tally {
  std::uint64_t outages = 0;
  std::uint64_t truncated = 0;
  std::uint64_t sum_b = 0, sum_b2 = 0;
  std::uint64_t sum_p = 0, sum_p2 = 0;
  U128 sum_index = 0;
  std::vector<std::uint64_t> tail;

  void add(const EncodeOutcome& o, std::uint64_t position, bool has_position,
           std::span<const std::uint64_t> sizes, int len_b, int len_p) {
    outages += o.outage ? 1 : 0;
    truncated += o.truncated ? 1 : 0;
    sum_b += static_cast<std::uint64_t>(len_b);
    sum_b2 += static_cast<std::uint64_t>(len_b) * static_cast<std::uint64_t>(len_b);
    sum_p += static_cast<std::uint64_t>(len_p);
    sum_p2 += static_cast<std::uint64_t>(len_p) * static_cast<std::uint64_t>(len_p);
    sum_index += o.index;
    for (std::size_t l = 0; l < sizes.size(); ++l)
      if (o.truncated || (has_position && position >= sizes[l])) ++tail[l];
  }

  void merge(const Tally& o) {
    outages += o.outages;
    truncated += o.truncated;
    sum_b += o.sum_b;
    sum_b2 += o.sum_b2;
    sum_p += o.sum_p;
    sum_p2 += o.sum_p2;
    sum_index += o.sum_index;
    for (std::size_t l = 0; l < tail.size(); ++l) tail[l] += o.tail[l];
  }
};

int fixed_length_bits(std::uint64_t n) {
  // ceil(log2 N)
  return n <= 1 ? 0 : static_cast<int>(std::bit_width(n - 1));
}

// Layers a codebook must cover for this config; -1 when none is used.
int required_layers(const SimConfig& c) {
  switch (c.mode) {
    case Mode::kVlq:
    case Mode::kPrecoding:
      return c.ell_max;
    case Mode::kFlq: {
      for (int ell = 0; ell <= kMaxLayer; ++ell)
        if (count_layer_sizes(c.params.t, ell).back() >= c.flq_size) return ell;
      throw std::invalid_argument("flq size exceeds the largest supported codebook");
    }
    default:
      return -1;
  }
}

double standard_error(long double sum, long double sum2, std::uint64_t n) {
  if (n < 2) return 0.0;
  const long double nn = static_cast<long double>(n);
  long double var = (sum2 - sum * sum / nn) / (nn - 1);
  if (var < 0) var = 0;
  return static_cast<double>(std::sqrt(var / nn));
}

SimResult run_with(const SimConfig& config, const CodebookStream* codebook) {
  config.validate();
  const int t = config.params.t;
  const double alpha = config.params.alpha;
  const Mode mode = config.mode;

  std::vector<DirectionKey> flq_book;
  std::vector<std::uint64_t> sizes;
  if (mode == Mode::kFlq) {
    flq_book = codebook->prefix(config.flq_size);
    if (flq_book.size() != config.flq_size) throw std::logic_error("codebook shorter than flq size");
  } else if (mode == Mode::kVlq || mode == Mode::kPrecoding) {
    sizes = codebook->layer_sizes();
    sizes.resize(static_cast<std::size_t>(config.ell_max + 1));
  }
  const int flq_bits = fixed_length_bits(config.flq_size);
  const EncodeOptions enc_opts{config.verify_cells};
  std::vector<std::int64_t> e1(static_cast<std::size_t>(2 * t), 0);
  e1[0] = 1;

  const std::uint64_t n_blocks = (config.n_samples + kSamplesPerBlock - 1) / kSamplesPerBlock;
  std::vector<Tally> tallies(static_cast<std::size_t>(n_blocks));
  for (auto& tl : tallies) tl.tail.assign(sizes.size(), 0);

  auto process_block = [&](std::uint64_t b) {
    Tally& tally = tallies[static_cast<std::size_t>(b)];
    RandomStream stream(config.seed, b);
    const std::uint64_t begin = b * kSamplesPerBlock;
    const std::uint64_t end = std::min(config.n_samples, begin + kSamplesPerBlock);
    ChannelVector h;
    h.entries.resize(static_cast<std::size_t>(t));
    for (std::uint64_t i = begin; i < end; ++i) {
      sample_channel_into(stream, h.entries);
      switch (mode) {
        case Mode::kVlq: {
          const auto o = encode_vlq(h, *codebook, alpha, enc_opts);
          tally.add(o, o.index, true, sizes, o.len_bstar, o.len_prefix);
          break;
        }
        case Mode::kPrecoding: {
          const auto o = encode_precoding(h, *codebook, alpha, enc_opts);
          tally.add(o, o.index - 1, o.index >= 1, sizes, o.len_bstar, o.len_prefix);
          break;
        }
        case Mode::kFlq: {
          const std::size_t idx = encode_flq_standard(h, flq_book);
          const bool out = gain(flq_book[idx], h) < alpha;
          EncodeOutcome o;
          o.index = idx;
          o.outage = out;
          tally.add(o, 0, false, sizes, flq_bits, flq_bits);
          break;
        }
        case Mode::kOpen: {
          EncodeOutcome o;
          o.outage = gain_raw(e1.data(), 1, h.entries.data(), t) < alpha;
          tally.add(o, 0, false, sizes, 0, 0);
          break;
        }
        case Mode::kFull: {
          EncodeOutcome o;
          o.outage = h.norm2() < alpha;
          tally.add(o, 0, false, sizes, 0, 0);
          break;
        }
      }
    }
  };

  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(config.shards, n_blocks));
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    try {
      for (std::uint64_t b = next++; b < n_blocks && !abort; b = next++) process_block(b);
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
      abort = true;
    }
  };
  try {
    if (workers <= 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(workers);
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
  } catch (const std::system_error& e) {
    throw std::runtime_error(std::string("simulation could not start worker threads: ") + e.what());
  }
  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const std::bad_alloc&) {
      throw std::runtime_error("simulation ran out of memory");
    }
  }

  Tally total;
  total.tail.assign(sizes.size(), 0);
  for (const auto& tl : tallies) total.merge(tl);

  SimResult r;
  const std::uint64_t n = config.n_samples;
  const double nd = static_cast<double>(n);
  r.n_samples = n;
  r.outage_count = total.outages;
  r.truncated_count = total.truncated;
  r.out_hat = static_cast<double>(total.outages) / nd;
  r.out_se = std::sqrt(r.out_hat * (1.0 - r.out_hat) / nd);
  r.rate_bstar_hat = static_cast<double>(total.sum_b) / nd;
  r.rate_prefix_hat = static_cast<double>(total.sum_p) / nd;
  r.rate_se = standard_error(total.sum_b, total.sum_b2, n);
  r.rate_prefix_se = standard_error(total.sum_p, total.sum_p2, n);
  r.truncation_frac = static_cast<double>(total.truncated) / nd;
  r.mean_index = static_cast<double>(static_cast<long double>(total.sum_index) / n);
  r.closed_full = out_full_closed(t, alpha);
  r.closed_open = out_open_closed(alpha);
  r.layer_sizes = sizes;
  r.tail_counts = total.tail;
  return r;
}

template <class T>
void append(std::string& s, const T& v) {
  if constexpr (std::is_same_v<T, double>) {
    s += format_double(v);
  } else if constexpr (std::is_same_v<T, std::string>) {
    s += v;
  } else {
    s += std::to_string(v);
  }
}

}  // namespace

void SimConfig::validate() const {
  if (params.t < 1) throw std::invalid_argument("t must be >= 1");
  if (!(params.rho > 0.0)) throw std::invalid_argument("rho must be > 0");
  if (!(params.power > 0.0)) throw std::invalid_argument("P must be > 0");
  if (params.alpha != alpha_of(params.rho, params.power))
    throw std::invalid_argument("alpha is not consistent with rho and P");
  if (ell_max < 0 || ell_max > kMaxLayer)
    throw std::invalid_argument("ell_max must be in [0, " + std::to_string(kMaxLayer) + "]");
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (shards < 1) throw std::invalid_argument("shards must be >= 1");
  if (mode == Mode::kFlq && flq_size < 1) throw std::invalid_argument("flq codebook size must be >= 1");
}

std::string SimConfig::mode_name() const {
  switch (mode) {
    case Mode::kVlq: return "vlq";
    case Mode::kFlq: return "flq:" + std::to_string(flq_size);
    case Mode::kPrecoding: return "precoding";
    case Mode::kOpen: return "open";
    case Mode::kFull: return "full";
  }
  return "?";
}

Mode parse_mode(const std::string& name, std::uint64_t& flq_size) {
  if (name == "vlq") return Mode::kVlq;
  if (name == "precoding") return Mode::kPrecoding;
  if (name == "open") return Mode::kOpen;
  if (name == "full") return Mode::kFull;
  std::string digits;
  if (name.rfind("flq:", 0) == 0) {
    digits = name.substr(4);
  } else if (name.rfind("flq(", 0) == 0 && name.size() > 5 && name.back() == ')') {
    digits = name.substr(4, name.size() - 5);
  } else if (name == "flq") {
    return Mode::kFlq;
  } else {
    throw std::invalid_argument("unknown mode '" + name + "' (vlq, flq:N, precoding, open, full)");
  }
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || v < 1)
    throw std::invalid_argument("bad flq size in mode '" + name + "'");
  flq_size = v;
  return Mode::kFlq;
}

double SimResult::tail_frac(int ell) const {
  if (ell < 0 || static_cast<std::size_t>(ell) >= tail_counts.size())
    throw std::out_of_range("no tail count for layer " + std::to_string(ell));
  return static_cast<double>(tail_counts[static_cast<std::size_t>(ell)]) / static_cast<double>(n_samples);
}

SimResult run(const SimConfig& config) {
  config.validate();
  const int layers = required_layers(config);
  if (layers < 0) return run_with(config, nullptr);
  const CodebookStream codebook(config.params.t, layers, config.cache_budget_bytes);
  return run_with(config, &codebook);
}

SimResult run(const SimConfig& config, const CodebookStream& codebook) {
  config.validate();
  const int layers = required_layers(config);
  if (layers < 0) return run_with(config, nullptr);
  if (codebook.t() != config.params.t || codebook.ell_max() < layers)
    throw std::invalid_argument("supplied codebook does not cover the configuration");
  return run_with(config, &codebook);
}

std::vector<SweepRow> sweep(std::span<const SimConfig> configs) {
  if (configs.empty()) throw std::invalid_argument("sweep needs at least one configuration");
  std::map<std::pair<int, int>, std::unique_ptr<CodebookStream>> books;
  std::vector<SweepRow> rows;
  rows.reserve(configs.size());
  for (const SimConfig& c : configs) {
    SweepRow row;
    row.config = c;
    try {
      c.validate();
      const int layers = required_layers(c);
      if (layers < 0) {
        row.result = run(c);
      } else {
        auto& book = books[{c.params.t, layers}];
        if (!book) book = std::make_unique<CodebookStream>(c.params.t, layers, c.cache_budget_bytes);
        row.result = run(c, *book);
      }
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::string csv_header() {
  return "mode,t,rho,P,alpha,ell_max,n_samples,out_hat,out_se,closed_full,closed_open,"
         "rate_bstar_hat,rate_prefix_hat,rate_se,truncation_frac,mean_index,seed";
}

std::string csv_row(const SimConfig& c, const SimResult& r) {
  std::string s;
  const auto sep = [&] { s += ','; };
  append(s, c.mode_name()); sep();
  append(s, c.params.t); sep();
  append(s, c.params.rho); sep();
  append(s, c.params.power); sep();
  append(s, c.params.alpha); sep();
  append(s, c.ell_max); sep();
  append(s, c.n_samples); sep();
  append(s, r.out_hat); sep();
  append(s, r.out_se); sep();
  append(s, r.closed_full); sep();
  append(s, r.closed_open); sep();
  append(s, r.rate_bstar_hat); sep();
  append(s, r.rate_prefix_hat); sep();
  append(s, r.rate_se); sep();
  append(s, r.truncation_frac); sep();
  append(s, r.mean_index); sep();
  append(s, c.seed);
  return s;
}

void write_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << csv_header() << '\n';
  const double nan = std::nan("");
  for (const auto& row : rows) {
    if (row.ok) {
      out << csv_row(row.config, row.result) << '\n';
    } else {
      SimResult blank;
      blank.out_hat = blank.out_se = blank.closed_full = blank.closed_open = nan;
      blank.rate_bstar_hat = blank.rate_prefix_hat = blank.rate_se = nan;
      blank.truncation_frac = blank.mean_index = nan;
      out << csv_row(row.config, blank) << '\n';
    }
  }
}

}  // namespace vlcq
