#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace vlcq {

/// Explicit evaluation of the achievability rate bound.
struct BoundReport {
  int ell0 = 1;
  double tail_constant = 0.0;           // C_1 = 3(t+1)/t
  double rate_bound = 0.0;              // bits per channel state
  double head_term = 0.0;               // alpha * floor(log2|Y_l0|) * (|Y_l0| - 2)
  std::vector<double> per_layer_terms;  // C_1 alpha^t floor(log2|Y_{l+1}|) / 2^l, materialized layers
  double capped_tail = 0.0;             // remaining layers, via |Y_l| <= 2^{2t(l+2)}
};

/// The three conditions the tail estimate needs at layer ell.
struct Ell0Conditions {
  bool witness_nonzero = false;  // 2t / 4^{l+1} < 1
  bool margin_positive = false;  // t/2^l - 6t^2/4^l > 0
  bool bracket_small = false;    // sum_{j<t} (1 + 3t/2^l)^j < t + 1
  bool all() const { return witness_nonzero && margin_positive && bracket_small; }
};

Ell0Conditions ell0_conditions(int t, int ell);
/// Smallest ell >= 1 satisfying every Ell0Conditions predicate.
int find_ell0(int t);

/// 3(t+1)/t.
double tail_constant(int t);

/// Upper bound (3(t+1)/t) alpha^t / 2^ell on the probability that the
/// sequential encoder needs an index beyond layer ell. Throws
/// std::domain_error for ell < find_ell0(t).
double tail_bound(int t, double alpha, int ell);

/// Needs cumulative layer sizes for layers 0..find_ell0(t)+1 at least.
BoundReport rate_upper_bound(int t, double alpha, std::span<const std::uint64_t> layer_sizes);

/// max(0, OUT(Open) - rate): outage floor for any quantizer of that rate.
double converse_floor(double alpha, double rate);

/// Least-squares slope of log(value) against log(P). Needs >= 3 points with
/// positive P and value.
double fit_decay_slope(std::span<const std::pair<double, double>> points);

// --- verification battery ---------------------------------------------------

struct VerifyConfig {
  int t = 2;
  double rho = 1.0;
  double power = 10.0;
  int ell_max = 4;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  unsigned shards = 1;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  /// Distance to the failure boundary in the check's natural unit; negative
  /// when the check failed.
  double margin = 0.0;
  std::string detail;
};

struct VerifyReport {
  VerifyConfig config;
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

/// Runs every numerical invariant of the construction (closed forms, codebook
/// oracle, covering, encoder equivalence, band inclusions, Monte Carlo
/// achievability and converse, Kraft sums, toy sources).
VerifyReport run_verification(const VerifyConfig& config);

}  // namespace vlcq
