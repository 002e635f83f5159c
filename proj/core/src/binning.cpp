#include "secdsc/binning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "secdsc/parallel.hpp"
#include "secdsc/random.hpp"
#include "summation.hpp"

namespace secdsc {

using namespace vars;

namespace {

constexpr std::uint64_t kTagUCodeword = 1;
constexpr std::uint64_t kTagVCodeword = 2;
constexpr std::uint64_t kTagUBin = 3;
constexpr std::uint64_t kTagVBin = 4;
constexpr std::uint64_t kTagABin = 5;
constexpr std::uint64_t kTagCBin = 6;

constexpr std::size_t kMaxCodewords = std::size_t{1} << 20;
constexpr std::size_t kReductionChunks = 1024;
constexpr double kWilsonZ = 1.959963984540054;
constexpr std::uint64_t kExhaustiveBudget = std::uint64_t{1} << 20;

std::uint64_t saturating_pow(std::uint64_t k, std::size_t n) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (k != 0 && r > std::numeric_limits<std::uint64_t>::max() / k) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    r *= k;
  }
  return r;
}

std::size_t count_for(double rate, std::size_t n, double slack, std::size_t cap) {
  const double exponent = static_cast<double>(n) * (std::max(rate, 0.0) + slack);
  const double raw = std::ceil(std::exp2(exponent) - 1e-9);
  if (!(raw < static_cast<double>(cap))) return cap;
  return std::max<std::size_t>(1, static_cast<std::size_t>(raw));
}

std::size_t draw(std::span<const double> probs, double u) {
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last = i;
    acc += probs[i];
    if (u < acc) return i;
  }
  return last;
}

std::vector<Sequence> draw_codewords(std::span<const double> marginal,
                                     std::size_t count, std::size_t n,
                                     std::uint64_t seed, std::uint64_t tag) {
  std::vector<Sequence> out(count, Sequence(n));
  for (std::size_t w = 0; w < count; ++w) {
    for (std::size_t i = 0; i < n; ++i) {
      out[w][i] = draw(marginal, to_unit(hash64(seed, tag, w * n + i)));
    }
  }
  return out;
}

// Label of object i is perm(i) mod bins for one seeded uniform permutation:
// bins are balanced, a count equal to the population is a bijection, and
// counts k and m*k give nested partitions.
std::vector<std::uint32_t> bin_map(std::uint64_t size, std::size_t bins,
                                   std::uint64_t seed, std::uint64_t tag) {
  std::vector<std::uint32_t> perm(size);
  for (std::uint64_t i = 0; i < size; ++i) perm[i] = static_cast<std::uint32_t>(i);
  Rng rng(seed, tag);
  for (std::uint64_t i = size; i > 1; --i) {
    std::swap(perm[i - 1], perm[rng.below(i)]);
  }
  for (auto& x : perm) x = static_cast<std::uint32_t>(x % bins);
  return perm;
}

struct Selection {
  std::size_t codeword;
  bool failed;
};

Selection select_codeword(std::span<const std::size_t> seq,
                          const std::vector<Sequence>& codewords,
                          const AuxChannel& channel, double delta) {
  const std::size_t rows = channel.input_cardinality();
  const std::size_t cols = channel.output_cardinality();
  const double n = static_cast<double>(seq.size());
  std::vector<std::size_t> marginal(rows, 0);
  for (std::size_t s : seq) {
    if (s >= rows) throw ArgumentError("source symbol out of range");
    ++marginal[s];
  }
  std::vector<std::size_t> joint(rows * cols);
  bool have_typical = false;
  bool have_any = false;
  Selection typical{0, false};
  Selection any{0, true};
  double typical_score = 0.0;
  double any_score = 0.0;
  for (std::size_t w = 0; w < codewords.size(); ++w) {
    std::fill(joint.begin(), joint.end(), 0);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      ++joint[seq[i] * cols + codewords[w][i]];
    }
    bool qualifies = true;
    double score = 0.0;
    for (std::size_t a = 0; a < rows; ++a) {
      for (std::size_t u = 0; u < cols; ++u) {
        const std::size_t k = joint[a * cols + u];
        const double expected = channel(a, u) * static_cast<double>(marginal[a]);
        if (std::abs(static_cast<double>(k) - expected) / n > delta) qualifies = false;
        if (k == 0) continue;
        score += static_cast<double>(k) * std::log2(channel(a, u));
      }
    }
    if (!have_any || score > any_score) {
      any = {w, true};
      any_score = score;
      have_any = true;
    }
    if (qualifies && (!have_typical || score > typical_score)) {
      typical = {w, false};
      typical_score = score;
      have_typical = true;
    }
  }
  return have_typical ? typical : any;
}

std::uint64_t checked_size(std::uint64_t n, std::uint64_t limit, const std::string& what) {
  if (n > limit) {
    throw ResourceError(what + " needs " + std::to_string(n) +
                        " entries, budget is " + std::to_string(limit));
  }
  return n;
}

// Advances an odometer (last digit fastest); returns the first position that
// changed.
std::size_t advance(std::vector<std::size_t>& digits, std::size_t k) {
  std::size_t j = digits.size();
  while (j > 0) {
    --j;
    if (++digits[j] < k) return j;
    digits[j] = 0;
  }
  return 0;
}

void build_preimages(const std::vector<std::uint32_t>& ids, std::size_t count,
                     std::vector<std::size_t>& offsets,
                     std::vector<std::uint32_t>& members) {
  offsets.assign(count + 1, 0);
  for (std::uint32_t id : ids) ++offsets[id + 1];
  for (std::size_t m = 0; m < count; ++m) offsets[m + 1] += offsets[m];
  members.resize(ids.size());
  std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
  for (std::size_t s = 0; s < ids.size(); ++s) {
    members[fill[ids[s]]++] = static_cast<std::uint32_t>(s);
  }
}

double wilson_low(double p, double n) {
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      kWilsonZ / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return std::max(0.0, center - half);
}

double wilson_high(double p, double n) {
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      kWilsonZ / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return std::min(1.0, center + half);
}

}  // namespace

std::string_view scheme_name(Scheme scheme) {
  return scheme == Scheme::kScheme1 ? "scheme1" : "scheme2";
}

Scheme scheme_from_name(std::string_view name) {
  if (name == "scheme1") return Scheme::kScheme1;
  if (name == "scheme2") return Scheme::kScheme2;
  throw ArgumentError("unknown scheme '" + std::string(name) + "'");
}

void CodebookSpec::validate() const {
  if (block_length == 0) throw ArgumentError("block length must be positive");
  const std::pair<const char*, std::size_t> counts[] = {
      {"u_codeword_count", u_codeword_count}, {"v_codeword_count", v_codeword_count},
      {"u_bin_count", u_bin_count},           {"v_bin_count", v_bin_count},
      {"a_bin_count", a_bin_count},           {"c_bin_count", c_bin_count}};
  for (const auto& [name, value] : counts) {
    if (value == 0) throw ArgumentError(std::string(name) + " must be positive");
    if (value > std::numeric_limits<std::uint32_t>::max()) {
      throw ArgumentError(std::string(name) + " exceeds 32 bits");
    }
  }
  if (!(typicality_delta >= 0.0)) throw ArgumentError("typicality delta must be >= 0");
  if (!(slack >= 0.0) || !std::isfinite(slack)) {
    throw ArgumentError("slack must be finite and >= 0");
  }
}

CodebookSpec CodebookSpec::from_rates(const ExtendedJoint& ext, std::size_t block_length,
                                      Scheme scheme, double slack, std::uint64_t seed) {
  if (block_length == 0) throw ArgumentError("block length must be positive");
  Entropies m(ext);
  const std::size_t n = block_length;
  const auto cap_a = static_cast<std::size_t>(
      std::min<std::uint64_t>(saturating_pow(ext.cardinality(Var::A), n),
                              std::numeric_limits<std::uint32_t>::max()));
  const auto cap_c = static_cast<std::size_t>(
      std::min<std::uint64_t>(saturating_pow(ext.cardinality(Var::C), n),
                              std::numeric_limits<std::uint32_t>::max()));
  CodebookSpec spec;
  spec.block_length = n;
  spec.slack = slack;
  spec.seed = seed;
  spec.scheme = scheme;
  spec.u_codeword_count = count_for(m.mi(A, U, B), n, slack, kMaxCodewords);
  spec.v_codeword_count = count_for(m.mi(C, V, B), n, slack, kMaxCodewords);
  if (scheme == Scheme::kScheme1) {
    spec.u_bin_count = count_for(m.mi(A, U, V | B), n, slack, spec.u_codeword_count);
    spec.a_bin_count = count_for(m.h(A, B | C | U), n, slack, cap_a);
    spec.c_bin_count = count_for(m.h(C, V | U | B), n, slack, cap_c);
  } else {
    spec.a_bin_count = count_for(m.h(A, U | V | B), n, slack, cap_a);
    spec.v_bin_count = count_for(m.mi(C, V, U | B), n, slack, spec.v_codeword_count);
    spec.c_bin_count = count_for(m.h(C, V | A | B), n, slack, cap_c);
  }
  spec.validate();
  return spec;
}

std::uint64_t sequence_count(std::size_t k, std::size_t n, std::uint64_t limit) {
  return checked_size(saturating_pow(k, n), limit,
                      "enumerating " + std::to_string(k) + "^" + std::to_string(n) +
                          " sequences");
}

Sequence sequence_from_index(std::uint64_t index, std::size_t k, std::size_t n) {
  Sequence seq(n);
  for (std::size_t i = n; i > 0; --i) {
    seq[i - 1] = static_cast<std::size_t>(index % k);
    index /= k;
  }
  return seq;
}

std::uint64_t sequence_index(std::span<const std::size_t> seq, std::size_t k) {
  std::uint64_t index = 0;
  for (std::size_t s : seq) {
    if (s >= k) throw ArgumentError("symbol " + std::to_string(s) + " out of range");
    index = index * k + s;
  }
  return index;
}

Codebook generate_codebook(const ExtendedJoint& ext, const CodebookSpec& spec) {
  spec.validate();
  const std::size_t n = spec.block_length;
  const std::size_t na = ext.cardinality(Var::A);
  const std::size_t nc = ext.cardinality(Var::C);
  const std::uint64_t a_sequences = sequence_count(na, n);
  const std::uint64_t c_sequences = sequence_count(nc, n);
  checked_size(saturating_pow(spec.u_codeword_count, 1) * n, kEnumerationBudget,
               "U codebook");
  checked_size(saturating_pow(spec.v_codeword_count, 1) * n, kEnumerationBudget,
               "V codebook");

  Codebook cb{spec, ext.u_channel(), ext.v_channel(), na, nc, {}, {}, {}, {}, {}, {}};
  const std::vector<double> pu = ext.marginal_pmf(U);
  const std::vector<double> pv = ext.marginal_pmf(V);
  cb.u_codewords = draw_codewords(pu, spec.u_codeword_count, n, spec.seed, kTagUCodeword);
  cb.v_codewords = draw_codewords(pv, spec.v_codeword_count, n, spec.seed, kTagVCodeword);
  if (spec.scheme == Scheme::kScheme1) {
    cb.u_bin_map = bin_map(spec.u_codeword_count, spec.u_bin_count, spec.seed, kTagUBin);
  } else {
    cb.v_bin_map = bin_map(spec.v_codeword_count, spec.v_bin_count, spec.seed, kTagVBin);
  }
  cb.a_bin_map = bin_map(a_sequences, spec.a_bin_count, spec.seed, kTagABin);
  cb.c_bin_map = bin_map(c_sequences, spec.c_bin_count, spec.seed, kTagCBin);
  return cb;
}

Message encode_alice(const Codebook& cb, std::span<const std::size_t> a_seq) {
  if (a_seq.size() != cb.spec.block_length) {
    throw ShapeError("A sequence has length " + std::to_string(a_seq.size()) +
                     ", block length is " + std::to_string(cb.spec.block_length));
  }
  const Selection sel =
      select_codeword(a_seq, cb.u_codewords, cb.u_channel, cb.spec.typicality_delta);
  Message m;
  m.codeword = sel.codeword;
  m.encoder_failed = sel.failed;
  m.index = cb.spec.scheme == Scheme::kScheme1 ? cb.u_bin_map[sel.codeword] : sel.codeword;
  m.bin = cb.a_bin_map[sequence_index(a_seq, cb.a_cardinality)];
  return m;
}

Message encode_charlie(const Codebook& cb, std::span<const std::size_t> c_seq) {
  if (c_seq.size() != cb.spec.block_length) {
    throw ShapeError("C sequence has length " + std::to_string(c_seq.size()) +
                     ", block length is " + std::to_string(cb.spec.block_length));
  }
  const Selection sel =
      select_codeword(c_seq, cb.v_codewords, cb.v_channel, cb.spec.typicality_delta);
  Message m;
  m.codeword = sel.codeword;
  m.encoder_failed = sel.failed;
  m.index = cb.spec.scheme == Scheme::kScheme2 ? cb.v_bin_map[sel.codeword] : sel.codeword;
  m.bin = cb.c_bin_map[sequence_index(c_seq, cb.c_cardinality)];
  return m;
}

Codec::Codec(const ExtendedJoint& ext, const CodebookSpec& spec)
    : codebook_(generate_codebook(ext, spec)),
      source_(ext.base()),
      triple_(ext.base().marginal_pmf(A | B | C)) {
  const std::size_t n = spec.block_length;
  const std::uint64_t a_sequences = codebook_.a_bin_map.size();
  const std::uint64_t c_sequences = codebook_.c_bin_map.size();
  if (alice_message_count() > std::numeric_limits<std::uint32_t>::max() ||
      charlie_message_count() > std::numeric_limits<std::uint32_t>::max()) {
    throw ResourceError("message alphabet exceeds 32 bits");
  }
  alice_.resize(a_sequences);
  charlie_.resize(c_sequences);
  parallel_for(a_sequences, [&](std::size_t s) {
    alice_[s] = encode_alice(codebook_, sequence_from_index(s, codebook_.a_cardinality, n));
  });
  parallel_for(c_sequences, [&](std::size_t s) {
    charlie_[s] =
        encode_charlie(codebook_, sequence_from_index(s, codebook_.c_cardinality, n));
  });
  alice_ids_.resize(a_sequences);
  charlie_ids_.resize(c_sequences);
  for (std::uint64_t s = 0; s < a_sequences; ++s) {
    alice_ids_[s] = static_cast<std::uint32_t>(message_id(Var::A, alice_[s]));
  }
  for (std::uint64_t s = 0; s < c_sequences; ++s) {
    charlie_ids_[s] = static_cast<std::uint32_t>(message_id(Var::C, charlie_[s]));
  }
  build_preimages(alice_ids_, alice_message_count(), alice_offsets_, alice_members_);
  build_preimages(charlie_ids_, charlie_message_count(), charlie_offsets_,
                  charlie_members_);
}

std::size_t Codec::alice_message_count() const {
  const auto& s = codebook_.spec;
  const std::size_t index =
      s.scheme == Scheme::kScheme1 ? s.u_bin_count : s.u_codeword_count;
  return index * s.a_bin_count;
}

std::size_t Codec::charlie_message_count() const {
  const auto& s = codebook_.spec;
  const std::size_t index =
      s.scheme == Scheme::kScheme2 ? s.v_bin_count : s.v_codeword_count;
  return index * s.c_bin_count;
}

std::size_t Codec::message_id(Var side, const Message& m) const {
  if (side == Var::A) return m.index * codebook_.spec.a_bin_count + m.bin;
  if (side == Var::C) return m.index * codebook_.spec.c_bin_count + m.bin;
  throw ArgumentError("message side must be A or C");
}

std::span<const std::uint32_t> Codec::alice_preimage(std::size_t id) const {
  if (id >= alice_message_count()) {
    throw ArgumentError("Alice message id " + std::to_string(id) + " out of range");
  }
  return std::span<const std::uint32_t>(alice_members_)
      .subspan(alice_offsets_[id], alice_offsets_[id + 1] - alice_offsets_[id]);
}

std::span<const std::uint32_t> Codec::charlie_preimage(std::size_t id) const {
  if (id >= charlie_message_count()) {
    throw ArgumentError("Charlie message id " + std::to_string(id) + " out of range");
  }
  return std::span<const std::uint32_t>(charlie_members_)
      .subspan(charlie_offsets_[id], charlie_offsets_[id + 1] - charlie_offsets_[id]);
}

MessageTable Codec::table(Var side) const {
  const std::size_t n = codebook_.spec.block_length;
  if (side == Var::A) {
    return {codebook_.a_cardinality, n, alice_message_count(), alice_ids_};
  }
  if (side == Var::C) {
    return {codebook_.c_cardinality, n, charlie_message_count(), charlie_ids_};
  }
  throw ArgumentError("message side must be A or C");
}

double Codec::rate_a() const {
  return std::log2(static_cast<double>(alice_message_count())) /
         static_cast<double>(codebook_.spec.block_length);
}

double Codec::rate_c() const {
  return std::log2(static_cast<double>(charlie_message_count())) /
         static_cast<double>(codebook_.spec.block_length);
}

double Codec::encoder_failure_probability(Var side) const {
  if (side != Var::A && side != Var::C) {
    throw ArgumentError("message side must be A or C");
  }
  const bool alice = side == Var::A;
  const std::vector<double> marginal = source_.marginal_pmf(alice ? A : C);
  const std::size_t k = marginal.size();
  const auto& messages = alice ? alice_ : charlie_;
  NeumaierSum total;
  for (std::size_t s = 0; s < messages.size(); ++s) {
    if (!messages[s].encoder_failed) continue;
    double p = 1.0;
    for (std::size_t sym : sequence_from_index(s, k, codebook_.spec.block_length)) {
      p *= marginal[sym];
    }
    total.add(p);
  }
  return total.value();
}

double sequence_probability(const JointDistribution& dist,
                            std::span<const std::size_t> a_seq,
                            std::span<const std::size_t> b_seq,
                            std::span<const std::size_t> c_seq) {
  if (a_seq.size() != b_seq.size() || b_seq.size() != c_seq.size()) {
    throw ShapeError("sequences of unequal length");
  }
  const auto [na, nb, nc, ne] = dist.source_dims();
  const std::vector<double> q = dist.marginal_pmf(A | B | C);
  double p = 1.0;
  for (std::size_t i = 0; i < a_seq.size(); ++i) {
    if (a_seq[i] >= na || b_seq[i] >= nb || c_seq[i] >= nc) {
      throw ArgumentError("symbol out of range at position " + std::to_string(i));
    }
    p *= q[(a_seq[i] * nb + b_seq[i]) * nc + c_seq[i]];
  }
  return p;
}

Decoded decode_bob(const Codec& codec, std::size_t msg_a, std::size_t msg_c,
                   std::span<const std::size_t> b_seq) {
  const auto& cb = codec.codebook();
  const std::size_t n = cb.spec.block_length;
  if (b_seq.size() != n) {
    throw ShapeError("B sequence has length " + std::to_string(b_seq.size()) +
                     ", block length is " + std::to_string(n));
  }
  const auto [na, nb, nc, ne] = codec.source().source_dims();
  for (std::size_t b : b_seq) {
    if (b >= nb) throw ArgumentError("B symbol out of range");
  }
  const auto q = codec.triple_pmf();
  const auto pre_a = codec.alice_preimage(msg_a);
  const auto pre_c = codec.charlie_preimage(msg_c);
  std::vector<Sequence> c_digits;
  c_digits.reserve(pre_c.size());
  for (std::uint32_t c : pre_c) c_digits.push_back(sequence_from_index(c, nc, n));

  double best = 0.0;
  std::uint32_t best_a = 0;
  std::uint32_t best_c = 0;
  bool found = false;
  for (std::uint32_t a : pre_a) {
    const Sequence ad = sequence_from_index(a, na, n);
    for (std::size_t j = 0; j < pre_c.size(); ++j) {
      double p = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        p *= q[(ad[i] * nb + b_seq[i]) * nc + c_digits[j][i]];
      }
      if (p > best) {
        best = p;
        best_a = a;
        best_c = pre_c[j];
        found = true;
      }
    }
  }
  Decoded out;
  out.found = found;
  if (found) {
    out.a_seq = sequence_from_index(best_a, na, n);
    out.c_seq = sequence_from_index(best_c, nc, n);
    out.u_codeword = codec.alice_message(best_a).codeword;
    out.v_codeword = codec.charlie_message(best_c).codeword;
  }
  return out;
}

double exact_error_probability(const Codec& codec) {
  const std::size_t n = codec.spec().block_length;
  const auto [na, nb, nc, ne] = codec.source().source_dims();
  sequence_count(na * nb * nc, n, kErrorEnumerationBudget);
  const std::uint64_t b_sequences = sequence_count(nb, n);
  const std::uint64_t c_sequences = sequence_count(nc, n);
  const std::size_t alice_count = codec.alice_message_count();
  const std::size_t charlie_count = codec.charlie_message_count();
  const auto q = codec.triple_pmf();
  const std::vector<double> pb = codec.source().marginal_pmf(B);

  std::vector<std::uint32_t> c_ids(c_sequences);
  std::vector<std::uint8_t> c_failed(c_sequences);
  for (std::uint64_t c = 0; c < c_sequences; ++c) {
    const Message& m = codec.charlie_message(c);
    c_ids[c] = static_cast<std::uint32_t>(codec.message_id(Var::C, m));
    c_failed[c] = m.encoder_failed ? 1 : 0;
  }

  // Work unit: one B sequence and one Alice message; fixed chunking keeps the
  // reduction order independent of the worker count.
  const std::uint64_t units = b_sequences * alice_count;
  const std::size_t chunks = static_cast<std::size_t>(
      std::min<std::uint64_t>(units, kReductionChunks));
  std::vector<NeumaierSum> partial(chunks);
  parallel_for(chunks, [&](std::size_t chunk) {
    const std::uint64_t lo = units * chunk / chunks;
    const std::uint64_t hi = units * (chunk + 1) / chunks;
    std::vector<double> best(charlie_count);
    std::vector<double> total(charlie_count);
    std::vector<std::uint8_t> ok(charlie_count);
    std::vector<double> prefix(n + 1, 1.0);
    std::vector<std::size_t> cd(n);
    NeumaierSum& acc = partial[chunk];
    for (std::uint64_t unit = lo; unit < hi; ++unit) {
      const std::uint64_t b = unit / alice_count;
      const std::size_t msg = static_cast<std::size_t>(unit % alice_count);
      const Sequence bd = sequence_from_index(b, nb, n);
      double p_b = 1.0;
      for (std::size_t sym : bd) p_b *= pb[sym];
      if (p_b == 0.0) continue;
      const auto pre = codec.alice_preimage(msg);
      if (pre.empty()) continue;
      std::fill(best.begin(), best.end(), 0.0);
      std::fill(total.begin(), total.end(), 0.0);
      std::fill(ok.begin(), ok.end(), 0);
      for (std::uint32_t a : pre) {
        const Sequence ad = sequence_from_index(a, na, n);
        const bool a_failed = codec.alice_message(a).encoder_failed;
        std::fill(cd.begin(), cd.end(), 0);
        std::size_t from = 0;
        for (std::uint64_t c = 0; c < c_sequences; ++c) {
          for (std::size_t i = from; i < n; ++i) {
            prefix[i + 1] = prefix[i] * q[(ad[i] * nb + bd[i]) * nc + cd[i]];
          }
          const double p = prefix[n];
          const std::uint32_t cell = c_ids[c];
          total[cell] += p;
          if (p > best[cell]) {
            best[cell] = p;
            ok[cell] = !a_failed && !c_failed[c];
          }
          from = advance(cd, nc);
        }
      }
      for (std::size_t cell = 0; cell < charlie_count; ++cell) {
        acc.add(ok[cell] ? total[cell] - best[cell] : total[cell]);
      }
    }
  });
  NeumaierSum sum;
  for (const auto& s : partial) sum.add(s);
  return std::clamp(sum.value(), 0.0, 1.0);
}

double exhaustive_error_probability(const Codec& codec) {
  const std::size_t n = codec.spec().block_length;
  const auto [na, nb, nc, ne] = codec.source().source_dims();
  sequence_count(na * nb * nc, n, kExhaustiveBudget);
  const std::uint64_t a_sequences = sequence_count(na, n);
  const std::uint64_t b_sequences = sequence_count(nb, n);
  const std::uint64_t c_sequences = sequence_count(nc, n);
  const auto q = codec.triple_pmf();
  NeumaierSum err;
  for (std::uint64_t b = 0; b < b_sequences; ++b) {
    const Sequence bd = sequence_from_index(b, nb, n);
    for (std::uint64_t a = 0; a < a_sequences; ++a) {
      const Sequence ad = sequence_from_index(a, na, n);
      const Message& ma = codec.alice_message(a);
      for (std::uint64_t c = 0; c < c_sequences; ++c) {
        const Sequence cd = sequence_from_index(c, nc, n);
        double p = 1.0;
        for (std::size_t i = 0; i < n; ++i) p *= q[(ad[i] * nb + bd[i]) * nc + cd[i]];
        if (p == 0.0) continue;
        const Message& mc = codec.charlie_message(c);
        const Decoded d = decode_bob(codec, codec.message_id(Var::A, ma),
                                     codec.message_id(Var::C, mc), bd);
        const bool wrong = !d.found || d.a_seq != ad || d.c_seq != cd ||
                           ma.encoder_failed || mc.encoder_failed;
        if (wrong) err.add(p);
      }
    }
  }
  return std::clamp(err.value(), 0.0, 1.0);
}

SimResult estimate_error(const Codec& codec, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw ArgumentError("trials must be >= 1");
  const std::size_t n = codec.spec().block_length;
  const auto [na, nb, nc, ne] = codec.source().source_dims();
  const auto pmf = codec.source().pmf();
  // bit 0: error event, bit 1: encoder failure
  std::vector<std::uint8_t> outcome(trials);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng(seed, t);
    Sequence ad(n), bd(n), cd(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t x = rng.categorical(pmf);
      x /= ne;
      cd[i] = x % nc;
      x /= nc;
      bd[i] = x % nb;
      ad[i] = x / nb;
    }
    const Message& ma = codec.alice_message(sequence_index(ad, na));
    const Message& mc = codec.charlie_message(sequence_index(cd, nc));
    const bool failed = ma.encoder_failed || mc.encoder_failed;
    const Decoded d =
        decode_bob(codec, codec.message_id(Var::A, ma), codec.message_id(Var::C, mc), bd);
    const bool wrong = failed || !d.found || d.a_seq != ad || d.c_seq != cd;
    outcome[t] = static_cast<std::uint8_t>((wrong ? 1 : 0) | (failed ? 2 : 0));
  });
  SimResult r;
  r.trials = trials;
  for (std::uint8_t o : outcome) {
    r.decode_errors += o & 1;
    r.encoder_failures += (o >> 1) & 1;
  }
  const double nt = static_cast<double>(trials);
  r.p_e_hat = static_cast<double>(r.decode_errors) / nt;
  r.ci_low = r.decode_errors == 0 ? 0.0 : wilson_low(r.p_e_hat, nt);
  r.ci_high = r.decode_errors == trials ? 1.0 : wilson_high(r.p_e_hat, nt);
  r.rate_a = codec.rate_a();
  r.rate_c = codec.rate_c();
  return r;
}

SimResult estimate_error(const ExtendedJoint& ext, const CodebookSpec& spec,
                         std::size_t trials, std::uint64_t seed) {
  return estimate_error(Codec(ext, spec), trials, seed);
}

double exact_equivocation(const JointDistribution& dist, Var source,
                          const MessageTable& table) {
  if (source != Var::A && source != Var::C) {
    throw ArgumentError("equivocation source must be A or C");
  }
  const std::size_t k = dist.cardinality(source);
  const std::size_t ne = dist.cardinality(Var::E);
  const std::size_t n = table.block_length;
  if (n == 0) throw ArgumentError("block length must be positive");
  if (table.symbol_count != k) {
    throw ShapeError("message table is over " + std::to_string(table.symbol_count) +
                     " symbols, source has " + std::to_string(k));
  }
  sequence_count(k * ne, n);
  const std::uint64_t s_sequences = sequence_count(k, n);
  const std::uint64_t e_sequences = sequence_count(ne, n);
  if (table.message_of.size() != s_sequences) {
    throw ShapeError("message table has " + std::to_string(table.message_of.size()) +
                     " entries, expected " + std::to_string(s_sequences));
  }
  const VarSet sv = source == Var::A ? A : C;
  const std::vector<double> pse = dist.marginal_pmf(sv | E);

  const std::size_t chunks = static_cast<std::size_t>(
      std::min<std::uint64_t>(e_sequences, kReductionChunks));
  std::vector<NeumaierSum> partial(chunks);
  parallel_for(chunks, [&](std::size_t chunk) {
    const std::uint64_t lo = e_sequences * chunk / chunks;
    const std::uint64_t hi = e_sequences * (chunk + 1) / chunks;
    std::vector<double> pm(table.message_count);
    std::vector<double> prefix(n + 1, 1.0);
    std::vector<std::size_t> sd(n);
    NeumaierSum& acc = partial[chunk];
    // Calls visit(s, p(s^N, e^N)) for every s in index order.
    auto sweep = [&](const Sequence& ed, auto&& visit) {
      std::fill(sd.begin(), sd.end(), 0);
      std::size_t from = 0;
      for (std::uint64_t s = 0; s < s_sequences; ++s) {
        for (std::size_t i = from; i < n; ++i) {
          prefix[i + 1] = prefix[i] * pse[sd[i] * ne + ed[i]];
        }
        visit(s, prefix[n]);
        from = advance(sd, k);
      }
    };
    for (std::uint64_t e = lo; e < hi; ++e) {
      const Sequence ed = sequence_from_index(e, ne, n);
      std::fill(pm.begin(), pm.end(), 0.0);
      sweep(ed, [&](std::uint64_t s, double p) { pm[table.message_of[s]] += p; });
      sweep(ed, [&](std::uint64_t s, double p) {
        if (p > 0.0) acc.add(-p * std::log2(p / pm[table.message_of[s]]));
      });
    }
  });
  NeumaierSum sum;
  for (const auto& s : partial) sum.add(s);
  return std::max(0.0, sum.value() / static_cast<double>(n));
}

double exact_equivocation(const Codec& codec, Var side) {
  return exact_equivocation(codec.source(), side, codec.table(side));
}

std::vector<ExperimentRow> run_experiment(const JointDistribution& dist,
                                          const AuxChannel& u_channel,
                                          const AuxChannel& v_channel,
                                          const std::vector<CodebookSpec>& spec_grid,
                                          std::size_t trials, std::uint64_t seed) {
  std::vector<ExperimentRow> rows;
  rows.reserve(spec_grid.size());
  const auto [na, nb, nc, ne] = dist.source_dims();
  for (const CodebookSpec& spec : spec_grid) {
    ExperimentRow row{spec, trials, seed, std::nullopt, {}};
    try {
      const ExtendedJoint ext = extend_joint(dist, u_channel, v_channel);
      const Codec codec(ext, spec);
      SimResult r = estimate_error(codec, trials, seed);
      const std::size_t n = spec.block_length;
      if (saturating_pow(na * nb * nc, n) <= kErrorEnumerationBudget) {
        r.exact_error = exact_error_probability(codec);
      }
      if (saturating_pow(na * ne, n) <= kEnumerationBudget) {
        r.equiv_a = exact_equivocation(codec, Var::A);
      }
      if (saturating_pow(nc * ne, n) <= kEnumerationBudget) {
        r.equiv_c = exact_equivocation(codec, Var::C);
      }
      row.result = r;
    } catch (const Error& e) {
      row.error = std::string(e.kind()) + ": " + e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace secdsc
