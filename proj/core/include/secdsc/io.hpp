#pragma once

// JSON documents for distributions, channels and simulation plans; CSV and
// run-manifest formatting for the command-line tool.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "secdsc/aux_channels.hpp"
#include "secdsc/binning.hpp"
#include "secdsc/prob.hpp"

namespace secdsc {

std::string_view version();

// Parsed distribution with its symbol names, indexed by A, B, C, E.
struct DistributionDocument {
  std::array<std::vector<std::string>, 4> alphabets;
  JointDistribution dist;
};

// Schema:
//   {"alphabets": {"A": ["0", "1"], ...},
//    "pmf": [{"a": "0", "b": "1", "c": "0", "e": "0", "p": 0.25}, ...]}
// Labels absent from "alphabets" get a single symbol and may be omitted from
// records. Omitted tuples have probability zero; nothing is renormalized.
// Throws ValidationError citing the record index or the total mass.
DistributionDocument parse_distribution_document(std::string_view text);
JointDistribution parse_distribution(std::string_view text);

// Symbols are named "0", "1", ... unless `alphabets` is given. Only nonzero
// entries are written; values use shortest round-trip formatting.
std::string serialize_distribution(
    const JointDistribution& dist,
    const std::optional<std::array<std::vector<std::string>, 4>>& alphabets = {});

// {"input": "A", "channel": [[p(0|0), p(1|0)], [p(0|1), p(1|1)]]}
// Throws ValidationError on malformed documents and propagates the channel's
// own validation errors.
AuxChannel parse_channel(std::string_view text);
std::string serialize_channel(const AuxChannel& channel);

// {"u_channel": <channel>, "v_channel": <channel>,
//  "rows": [{"block_length": 4, "a_bin_count": 8, ..., "scheme": "scheme1"}]}
// Channels are optional (constant when absent). Row fields default to the
// CodebookSpec defaults, with `seed` defaulting to `default_seed`.
struct SimulationPlan {
  std::optional<AuxChannel> u_channel;
  std::optional<AuxChannel> v_channel;
  std::vector<CodebookSpec> rows;
};

SimulationPlan parse_simulation_plan(std::string_view text, std::uint64_t default_seed);

// Reads a whole file; throws ValidationError if it cannot be opened.
std::string read_file(const std::string& path);

// 12 significant digits.
std::string format_number(double x);
std::string csv_line(const std::vector<std::string>& fields);

std::uint64_t fnv1a64(std::string_view data);

struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::optional<std::uint64_t> seed;
  std::uint64_t input_digest = 0;
  std::string wall_clock;  // ISO-8601 UTC

  // `#`-prefixed header lines, each terminated by '\n'.
  std::string render() const;
};

std::string utc_timestamp();

}  // namespace secdsc
