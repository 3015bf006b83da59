#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "vlcq/codebook.hpp"
#include "vlcq/core_math.hpp"

namespace vlcq {

enum class Mode { kVlq, kFlq, kPrecoding, kOpen, kFull };

/// Samples are grouped in fixed blocks; sample i is drawn from
/// RandomStream(seed, i / kSamplesPerBlock) after i % kSamplesPerBlock
/// earlier channels of that block. Worker threads only decide which blocks
/// they process, so results do not depend on the worker count.
inline constexpr std::uint64_t kSamplesPerBlock = 4096;

struct SimConfig {
  SystemParams params = SystemParams::make(2, 1.0, 10.0);
  int ell_max = 4;
  std::uint64_t n_samples = 100000;
  std::uint64_t seed = 1;
  unsigned shards = 1;
  Mode mode = Mode::kVlq;
  std::uint64_t flq_size = 80;  // codebook size N for Mode::kFlq
  bool verify_cells = false;
  std::size_t cache_budget_bytes = CodebookStream::kDefaultCacheBudget;

  /// Throws std::invalid_argument describing the first bad field.
  void validate() const;
  /// "vlq", "flq:N", "precoding", "open" or "full".
  std::string mode_name() const;
};

/// Parses a mode name as produced by SimConfig::mode_name(); "flq(N)" is also
/// accepted. Sets flq_size for flq modes.
Mode parse_mode(const std::string& name, std::uint64_t& flq_size);

struct SimResult {
  double out_hat = 0.0;
  double out_se = 0.0;
  double rate_bstar_hat = 0.0;   // bits per channel state
  double rate_prefix_hat = 0.0;
  double rate_se = 0.0;          // standard error of rate_bstar_hat
  double rate_prefix_se = 0.0;
  double truncation_frac = 0.0;
  double mean_index = 0.0;
  std::uint64_t n_samples = 0;
  double closed_full = 0.0;
  double closed_open = 0.0;

  std::uint64_t outage_count = 0;
  std::uint64_t truncated_count = 0;
  /// Codebook cumulative sizes used by the run (empty for open/full).
  std::vector<std::uint64_t> layer_sizes;
  /// tail_counts[l]: samples whose cell index is >= layer_sizes[l]
  /// (truncated samples are beyond every layer).
  std::vector<std::uint64_t> tail_counts;

  double tail_frac(int ell) const;
};

/// Runs one Monte Carlo experiment. For vlq/precoding/flq the codebook is
/// built from the config (or `codebook` when given, which must match t and
/// cover ell_max). Deterministic for fixed (config minus shards).
SimResult run(const SimConfig& config);
SimResult run(const SimConfig& config, const CodebookStream& codebook);

struct SweepRow {
  SimConfig config;
  bool ok = false;
  std::string error;
  SimResult result;
};

/// One row per config, in input order. Configs sharing (t, ell_max) share a
/// codebook. A failing config yields ok = false and its message.
std::vector<SweepRow> sweep(std::span<const SimConfig> configs);

/// Exact CSV header of simulation output.
std::string csv_header();
std::string csv_row(const SimConfig& config, const SimResult& result);
void write_csv(std::ostream& out, std::span<const SweepRow> rows);

/// Shortest round-trip decimal for a double ("nan"/"inf" for non-finite).
std::string format_double(double v);

}  // namespace vlcq
