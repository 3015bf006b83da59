#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "vlcq/channel.hpp"
#include "vlcq/codebook.hpp"

namespace vlcq {

/// Result of encoding one channel realization.
struct EncodeOutcome {
  std::uint64_t index = 0;  // codeword n fed back
  int len_bstar = 0;        // floor(log2(n+1)): enumeration code, empty word allowed
  int len_prefix = 1;       // ceil(2 log2(n+1) + 1): prefix-free code
  bool outage = false;
  bool truncated = false;   // band state left unresolved by the layer cap; implies outage

  static EncodeOutcome make(std::uint64_t index, bool outage, bool truncated = false);
};

// --- feedback codewords ------------------------------------------------------

/// floor(log2(n+1)).
int length_bstar(std::uint64_t n);
/// n-th word of {eps, 0, 1, 00, 01, 10, 11, 000, ...}.
std::string codeword_bstar(std::uint64_t n);

/// ceil(2 log2(n+1) + 1), computed in integers. Requires n < 2^32 - 1.
int length_prefix_free(std::uint64_t n);
/// Canonical (Kraft-order) prefix-free codeword with length_prefix_free(n)
/// bits: codewords are assigned in order of nondecreasing length.
std::string codeword_prefix_free(std::uint64_t n);

enum class LengthScheme { kBstar, kPrefixFree };

struct KraftSum {
  double partial = 0.0;     // sum_{n < n_terms} 2^-len(n)
  double tail_bound = 0.0;  // upper bound on the remaining terms (inf if divergent)
};

/// Kraft sum of the first n_terms codeword lengths. For the prefix-free
/// lengths the tail is bounded by sum_{m>N} 1/(2 m^2) <= 1/(2N).
KraftSum kraft_sum(LengthScheme scheme, std::uint64_t n_terms);

// --- encoders ----------------------------------------------------------------

struct EncodeOptions {
  /// Re-check the cell definition of every non-truncated outcome: the chosen
  /// codeword clears alpha and every earlier one fails. Throws
  /// std::logic_error on a violation.
  bool verify_cells = false;
};

/// Sequential rule over the layered codebook: index 0 if ||h||^2 < alpha or
/// y_0 clears the threshold, else the first y_n that does. If nothing up to
/// the layer cap clears it, the outcome is index 0, outage, truncated.
EncodeOutcome encode_vlq(const ChannelVector& h, const CodebookStream& stream, double alpha,
                         const EncodeOptions& options = {});

/// Argmax of the gain over a finite codebook, lowest index on ties.
std::size_t encode_flq_standard(const ChannelVector& h, std::span<const DirectionKey> codebook);

/// Sequential rule restricted to a finite codebook; index 0 with outage when
/// every member fails.
EncodeOutcome encode_flq_sequential(const ChannelVector& h, std::span<const DirectionKey> codebook,
                                    double alpha);

/// Precoding variant: codeword 0 is I / sqrt(t) (Frobenius norm 1, outage iff
/// ||h||^2 / t < alpha); codeword n >= 1 is the beamformer y_{n-1}.
EncodeOutcome encode_precoding(const ChannelVector& h, const CodebookStream& stream, double alpha,
                               const EncodeOptions& options = {});

}  // namespace vlcq
