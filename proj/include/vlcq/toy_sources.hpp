#pragma once

// Infinite-alphabet toy sources where a variable-length quantizer reaches
// zero distortion at finite rate while every fixed-length one cannot.
//
// Law: p_n = (6 / pi^2) / (n + 1)^2 for n = 0, 1, 2, ...
// Continuous variant: [0, 1] split left to right into intervals X_n of length
// p_n, X_n = [C_n, C_{n+1}) with C_n = p_0 + ... + p_{n-1}. The single point
// x = 1 (not reached by any C_n) is assigned to X_0.

#include <cstdint>

namespace vlcq {

double toy_probability(std::uint64_t n);

/// sum_{m >= first} 1/m^2 for first >= 1, to full double precision.
double inverse_square_tail(std::uint64_t first);

/// C_n = sum_{k < n} p_k.
double toy_cumulative(std::uint64_t n);

struct RateBracket {
  double lower = 0.0;
  double upper = 0.0;
  double width() const { return upper - lower; }
};

/// Bracket on sum_n p_n * ceil(2 log2(n+1) + 1): exact partial sum over
/// n < n_trunc, plus an integral bound on the rest.
RateBracket toy_vlq_rate(std::uint64_t n_trunc);

/// Smallest Hamming distortion of an N-level fixed-length quantizer: the
/// probability mass outside the N most likely letters.
double toy_flq_distortion(std::uint64_t levels);

/// Index n with x in X_n.
std::uint64_t example2_encode(double x);

/// d_0(x, x_n): 0 when x lies in X_n, else 1.
int example2_distortion(double x, std::uint64_t n);

}  // namespace vlcq
