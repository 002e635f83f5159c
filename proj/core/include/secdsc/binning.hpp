#pragma once

// Finite-blocklength random-binning codec: seeded codebooks, typed-MAP
// encoders, an exhaustive MAP decoder, and exact enumeration of the error
// probability and of the eavesdropper's equivocation.
//
// Sequences of length N over an alphabet of size k are indexed as base-k
// integers with the first symbol most significant.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "secdsc/aux_channels.hpp"
#include "secdsc/error.hpp"
#include "secdsc/prob.hpp"

namespace secdsc {

// Largest table any single enumeration may cover (source or codec tables).
inline constexpr std::uint64_t kEnumerationBudget = std::uint64_t{1} << 26;
// Largest (|A||B||C|)^N covered by the exact error-probability enumeration.
inline constexpr std::uint64_t kErrorEnumerationBudget = std::uint64_t{1} << 28;

// Which of the two binning constructions to realize.
//   kScheme1: Alice sends (a(w1), b(A^N)), Charlie sends (w2, c(C^N)).
//   kScheme2: Alice sends (w1, b(A^N)), Charlie sends (a(w2), c(C^N)).
enum class Scheme { kScheme1, kScheme2 };

std::string_view scheme_name(Scheme scheme);
// Accepts "scheme1" / "scheme2"; throws ArgumentError otherwise.
Scheme scheme_from_name(std::string_view name);

struct CodebookSpec {
  std::size_t block_length = 1;
  std::size_t u_codeword_count = 1;
  std::size_t v_codeword_count = 1;
  // Bins over U codewords (scheme 1 only).
  std::size_t u_bin_count = 1;
  // Bins over V codewords (scheme 2 only).
  std::size_t v_bin_count = 1;
  std::size_t a_bin_count = 1;
  std::size_t c_bin_count = 1;
  double slack = 0.0;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::kScheme1;
  // L-infinity radius of the conditional-type test used by the encoders.
  double typicality_delta = 0.15;

  // Throws ArgumentError when a count or N is zero or delta is negative.
  void validate() const;

  // Counts ceil(2^{N(rate + slack)}) from the rate expressions of the chosen
  // scheme at the channels carried by `ext`, capped at the number of
  // distinct objects being binned.
  static CodebookSpec from_rates(const ExtendedJoint& ext, std::size_t block_length,
                                 Scheme scheme, double slack, std::uint64_t seed);

  friend bool operator==(const CodebookSpec&, const CodebookSpec&) = default;
};

using Sequence = std::vector<std::size_t>;

// k^n, throwing ResourceError (with the computed size) above `limit`.
std::uint64_t sequence_count(std::size_t k, std::size_t n,
                             std::uint64_t limit = kEnumerationBudget);
Sequence sequence_from_index(std::uint64_t index, std::size_t k, std::size_t n);
std::uint64_t sequence_index(std::span<const std::size_t> seq, std::size_t k);

struct Codebook {
  CodebookSpec spec;
  AuxChannel u_channel;
  AuxChannel v_channel;
  std::size_t a_cardinality;
  std::size_t c_cardinality;
  std::vector<Sequence> u_codewords;
  std::vector<Sequence> v_codewords;
  std::vector<std::uint32_t> u_bin_map;  // scheme 1
  std::vector<std::uint32_t> v_bin_map;  // scheme 2
  std::vector<std::uint32_t> a_bin_map;  // indexed by A^N sequence index
  std::vector<std::uint32_t> c_bin_map;  // indexed by C^N sequence index

  friend bool operator==(const Codebook&, const Codebook&) = default;
};

// Codeword w symbol i is counter-hashed from the seed, so a codebook with
// more codewords extends one with fewer. Each bin map reduces one seeded
// permutation of its population modulo the bin count: maps with counts k and
// m*k are nested, and a count equal to the population is injective. Throws ResourceError when a table would
// exceed kEnumerationBudget entries.
Codebook generate_codebook(const ExtendedJoint& ext, const CodebookSpec& spec);

struct Message {
  std::size_t index = 0;     // a(w1) or w1 (resp. w2 or a(w2))
  std::size_t bin = 0;       // b(A^N) (resp. c(C^N))
  std::size_t codeword = 0;  // selected w
  bool encoder_failed = false;

  friend bool operator==(const Message&, const Message&) = default;
};

// Among codewords whose conditional type with the source sequence is within
// typicality_delta, the one maximizing p(u^N | a^N), lowest index on ties.
// With no qualifying codeword the global maximizer is used and flagged.
Message encode_alice(const Codebook& cb, std::span<const std::size_t> a_seq);
Message encode_charlie(const Codebook& cb, std::span<const std::size_t> c_seq);

struct Decoded {
  Sequence a_seq;
  Sequence c_seq;
  std::size_t u_codeword = 0;
  std::size_t v_codeword = 0;
  bool found = false;
};

// Deterministic encoder map over all source sequences.
struct MessageTable {
  std::size_t symbol_count;
  std::size_t block_length;
  std::size_t message_count;
  std::vector<std::uint32_t> message_of;

  // Tabulates `fn(sequence)` for every sequence; fn returns an id below
  // message_count (ShapeError otherwise).
  template <typename Fn>
  static MessageTable from_function(std::size_t symbol_count, std::size_t block_length,
                                    std::size_t message_count, Fn&& fn);
};

// Codebook plus the encoder outputs for every A^N and C^N sequence and their
// preimage lists; immutable after construction.
class Codec {
 public:
  Codec(const ExtendedJoint& ext, const CodebookSpec& spec);

  const Codebook& codebook() const { return codebook_; }
  const CodebookSpec& spec() const { return codebook_.spec; }
  const JointDistribution& source() const { return source_; }
  // p(a, b, c) row-major; the per-symbol factor of every sequence probability.
  std::span<const double> triple_pmf() const { return triple_; }

  std::size_t alice_message_count() const;
  std::size_t charlie_message_count() const;
  // Flattened message id index * bin_count + bin.
  std::size_t message_id(Var side, const Message& m) const;
  const Message& alice_message(std::uint64_t a_index) const { return alice_[a_index]; }
  const Message& charlie_message(std::uint64_t c_index) const {
    return charlie_[c_index];
  }
  std::span<const std::uint32_t> alice_preimage(std::size_t id) const;
  std::span<const std::uint32_t> charlie_preimage(std::size_t id) const;

  MessageTable table(Var side) const;

  // Operational rates log2(message count) / N.
  double rate_a() const;
  double rate_c() const;

  // Fraction of source probability mass on which an encoder raised its flag.
  double encoder_failure_probability(Var side) const;

 private:
  Codebook codebook_;
  JointDistribution source_;
  std::vector<double> triple_;
  std::vector<Message> alice_;
  std::vector<Message> charlie_;
  std::vector<std::uint32_t> alice_ids_;
  std::vector<std::uint32_t> charlie_ids_;
  std::vector<std::size_t> alice_offsets_;
  std::vector<std::uint32_t> alice_members_;
  std::vector<std::size_t> charlie_offsets_;
  std::vector<std::uint32_t> charlie_members_;
};

// Probability of a source triple, multiplied left to right in symbol order.
double sequence_probability(const JointDistribution& dist,
                            std::span<const std::size_t> a_seq,
                            std::span<const std::size_t> b_seq,
                            std::span<const std::size_t> c_seq);

// MAP over preimage(msg_a) x preimage(msg_c) of p(a^N, b^N, c^N); ties go to
// the lowest A index, then the lowest C index. found = false only when every
// candidate has probability zero.
Decoded decode_bob(const Codec& codec, std::size_t msg_a, std::size_t msg_c,
                   std::span<const std::size_t> b_seq);

// Exact P_e by enumeration; an encoder failure counts as an error. Throws
// ResourceError beyond kErrorEnumerationBudget.
double exact_error_probability(const Codec& codec);

// Same quantity obtained by running decode_bob on every source triple,
// weighted by its probability. Quadratic in the preimage sizes; for small N.
double exhaustive_error_probability(const Codec& codec);

struct SimResult {
  std::size_t trials = 0;
  std::size_t decode_errors = 0;  // includes encoder failures
  std::size_t encoder_failures = 0;
  double p_e_hat = 0.0;
  double ci_low = 0.0;  // 95% Wilson score interval
  double ci_high = 0.0;
  double rate_a = 0.0;
  double rate_c = 0.0;
  std::optional<double> exact_error;
  std::optional<double> equiv_a;
  std::optional<double> equiv_c;
};

// Monte Carlo: trial t draws N i.i.d. source symbols from Rng(seed, t).
// Throws ArgumentError when trials == 0.
SimResult estimate_error(const Codec& codec, std::size_t trials, std::uint64_t seed);
SimResult estimate_error(const ExtendedJoint& ext, const CodebookSpec& spec,
                         std::size_t trials, std::uint64_t seed);

// (1/N) H(S^N | M, E^N) for S = A or C encoded by `table`, by enumeration of
// S^N x E^N with compensated summation. Throws ResourceError beyond
// kEnumerationBudget and ShapeError when the table does not match.
double exact_equivocation(const JointDistribution& dist, Var source,
                          const MessageTable& table);
double exact_equivocation(const Codec& codec, Var side);

struct ExperimentRow {
  CodebookSpec spec;
  std::size_t trials;
  std::uint64_t seed;
  std::optional<SimResult> result;
  std::string error;  // "<kind>: <message>" when the row failed
};

// One row per spec; exact error and equivocations are filled in whenever the
// enumeration budgets allow. A failing row records its error and the sweep
// continues.
std::vector<ExperimentRow> run_experiment(const JointDistribution& dist,
                                          const AuxChannel& u_channel,
                                          const AuxChannel& v_channel,
                                          const std::vector<CodebookSpec>& spec_grid,
                                          std::size_t trials, std::uint64_t seed);

template <typename Fn>
MessageTable MessageTable::from_function(std::size_t symbol_count,
                                         std::size_t block_length,
                                         std::size_t message_count, Fn&& fn) {
  const std::uint64_t n = sequence_count(symbol_count, block_length);
  MessageTable t{symbol_count, block_length, message_count, {}};
  t.message_of.resize(n);
  for (std::uint64_t s = 0; s < n; ++s) {
    const std::size_t m = fn(sequence_from_index(s, symbol_count, block_length));
    if (m >= message_count) {
      throw ShapeError("message id " + std::to_string(m) + " out of range " +
                       std::to_string(message_count));
    }
    t.message_of[s] = static_cast<std::uint32_t>(m);
  }
  return t;
}

}  // namespace secdsc
