#include "secdsc/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "secdsc/error.hpp"

namespace secdsc {

using json = nlohmann::json;

namespace {

constexpr std::array<Var, 4> kSourceOrder{Var::A, Var::B, Var::C, Var::E};
constexpr std::array<const char*, 4> kRecordKeys{"a", "b", "c", "e"};

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

std::string symbol_name(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer() || j.is_number_unsigned()) return j.dump();
  throw ValidationError("symbol names must be strings or integers, got " + j.dump());
}

std::size_t size_field(const json& row, const char* key, std::size_t fallback,
                       std::size_t index) {
  if (!row.contains(key)) return fallback;
  const json& v = row.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw ValidationError("plan row " + std::to_string(index) + ": '" + key +
                          "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

double number_field(const json& row, const char* key, double fallback,
                    std::size_t index) {
  if (!row.contains(key)) return fallback;
  const json& v = row.at(key);
  if (!v.is_number()) {
    throw ValidationError("plan row " + std::to_string(index) + ": '" + key +
                          "' must be a number");
  }
  return v.get<double>();
}

AuxChannel channel_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("input") || !doc.contains("channel")) {
    throw ValidationError("channel document needs 'input' and 'channel' keys");
  }
  if (!doc["input"].is_string()) throw ValidationError("'input' must be \"A\" or \"C\"");
  const std::string input = doc["input"].get<std::string>();
  const auto var = input.size() == 1 ? var_from_char(input[0]) : std::nullopt;
  if (!var || (*var != Var::A && *var != Var::C)) {
    throw ValidationError("channel input must be A or C, got '" + input + "'");
  }
  const json& rows = doc["channel"];
  if (!rows.is_array() || rows.empty()) {
    throw ValidationError("'channel' must be a nonempty array of rows");
  }
  std::size_t cols = 0;
  std::vector<double> matrix;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r].is_array() || rows[r].empty()) {
      throw ValidationError("channel row " + std::to_string(r) + " must be a nonempty array");
    }
    if (r == 0) cols = rows[r].size();
    if (rows[r].size() != cols) {
      throw ValidationError("channel row " + std::to_string(r) + " has " +
                            std::to_string(rows[r].size()) + " entries, expected " +
                            std::to_string(cols));
    }
    for (const json& x : rows[r]) {
      if (!x.is_number()) {
        throw ValidationError("channel row " + std::to_string(r) + " has a non-numeric entry");
      }
      matrix.push_back(x.get<double>());
    }
  }
  return AuxChannel(*var, rows.size(), cols, std::move(matrix));
}

json channel_to_json(const AuxChannel& ch) {
  json rows = json::array();
  for (std::size_t r = 0; r < ch.input_cardinality(); ++r) {
    json row = json::array();
    for (double x : ch.row(r)) row.push_back(x);
    rows.push_back(std::move(row));
  }
  return json{{"input", std::string(1, to_char(ch.input()))}, {"channel", rows}};
}

}  // namespace

std::string_view version() { return SECDSC_VERSION; }

DistributionDocument parse_distribution_document(std::string_view text) {
  const json doc = parse_json(text, "distribution document");
  if (!doc.is_object()) throw ValidationError("distribution document must be an object");
  if (!doc.contains("pmf") || !doc["pmf"].is_array()) {
    throw ValidationError("distribution document needs a 'pmf' array");
  }
  std::array<std::vector<std::string>, 4> alphabets;
  std::array<std::map<std::string, std::size_t>, 4> lookup;
  const json alph = doc.value("alphabets", json::object());
  if (!alph.is_object()) throw ValidationError("'alphabets' must be an object");
  for (const auto& [label, symbols] : alph.items()) {
    const auto var = label.size() == 1 ? var_from_char(label[0]) : std::nullopt;
    const auto slot = var ? std::find(kSourceOrder.begin(), kSourceOrder.end(), *var)
                          : kSourceOrder.end();
    if (slot == kSourceOrder.end()) {
      throw ValidationError("unknown alphabet label '" + label + "'");
    }
    const std::size_t k = static_cast<std::size_t>(slot - kSourceOrder.begin());
    if (!symbols.is_array() || symbols.empty()) {
      throw ValidationError("alphabet " + label + " must be a nonempty array");
    }
    for (const json& s : symbols) {
      std::string name = symbol_name(s);
      if (!lookup[k].emplace(name, alphabets[k].size()).second) {
        throw ValidationError("alphabet " + label + " repeats symbol '" + name + "'");
      }
      alphabets[k].push_back(std::move(name));
    }
  }
  for (std::size_t k = 0; k < 4; ++k) {
    if (alphabets[k].empty()) {
      alphabets[k].push_back("0");
      lookup[k].emplace("0", 0);
    }
  }
  const std::array<std::size_t, 4> dims{alphabets[0].size(), alphabets[1].size(),
                                        alphabets[2].size(), alphabets[3].size()};
  std::vector<double> pmf(dims[0] * dims[1] * dims[2] * dims[3], 0.0);
  std::vector<bool> seen(pmf.size(), false);
  const json& records = doc["pmf"];
  double total = 0.0;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const json& rec = records[r];
    const std::string where = "pmf record " + std::to_string(r);
    if (!rec.is_object()) throw ValidationError(where + " must be an object");
    std::array<std::size_t, 4> idx{};
    for (std::size_t k = 0; k < 4; ++k) {
      if (!rec.contains(kRecordKeys[k])) {
        if (dims[k] == 1) continue;
        throw ValidationError(where + " lacks '" + kRecordKeys[k] + "'");
      }
      const std::string name = symbol_name(rec[kRecordKeys[k]]);
      const auto it = lookup[k].find(name);
      if (it == lookup[k].end()) {
        throw ValidationError(where + ": unknown symbol '" + name + "' for " +
                              std::string(1, to_char(kSourceOrder[k])));
      }
      idx[k] = it->second;
    }
    for (const auto& [key, value] : rec.items()) {
      if (key != "a" && key != "b" && key != "c" && key != "e" && key != "p") {
        throw ValidationError(where + ": unexpected key '" + key + "'");
      }
    }
    if (!rec.contains("p") || !rec["p"].is_number()) {
      throw ValidationError(where + " needs a numeric 'p'");
    }
    const double p = rec["p"].get<double>();
    if (!std::isfinite(p) || p < 0.0) {
      throw ValidationError(where + ": probability " + format_number(p) +
                            " is negative or not finite");
    }
    const std::size_t flat = ((idx[0] * dims[1] + idx[1]) * dims[2] + idx[2]) * dims[3] + idx[3];
    if (seen[flat]) throw ValidationError(where + " repeats an earlier tuple");
    seen[flat] = true;
    pmf[flat] = p;
    total += p;
  }
  if (std::abs(total - 1.0) > Distribution::kMassTolerance) {
    throw ValidationError("probabilities sum to " + format_number(total) +
                          ", expected 1 within 1e-9");
  }
  return DistributionDocument{std::move(alphabets), JointDistribution(dims, std::move(pmf))};
}

JointDistribution parse_distribution(std::string_view text) {
  return parse_distribution_document(text).dist;
}

std::string serialize_distribution(
    const JointDistribution& dist,
    const std::optional<std::array<std::vector<std::string>, 4>>& alphabets) {
  const auto dims = dist.source_dims();
  std::array<std::vector<std::string>, 4> names;
  for (std::size_t k = 0; k < 4; ++k) {
    if (alphabets) {
      if ((*alphabets)[k].size() != dims[k]) {
        throw ShapeError("alphabet for " + std::string(1, to_char(kSourceOrder[k])) +
                         " has " + std::to_string((*alphabets)[k].size()) +
                         " names, cardinality is " + std::to_string(dims[k]));
      }
      names[k] = (*alphabets)[k];
    } else {
      for (std::size_t s = 0; s < dims[k]; ++s) names[k].push_back(std::to_string(s));
    }
  }
  json doc;
  for (std::size_t k = 0; k < 4; ++k) {
    doc["alphabets"][std::string(1, to_char(kSourceOrder[k]))] = names[k];
  }
  doc["pmf"] = json::array();
  for (std::size_t a = 0; a < dims[0]; ++a) {
    for (std::size_t b = 0; b < dims[1]; ++b) {
      for (std::size_t c = 0; c < dims[2]; ++c) {
        for (std::size_t e = 0; e < dims[3]; ++e) {
          const double p = dist.p(a, b, c, e);
          if (p == 0.0) continue;
          doc["pmf"].push_back({{"a", names[0][a]},
                                {"b", names[1][b]},
                                {"c", names[2][c]},
                                {"e", names[3][e]},
                                {"p", p}});
        }
      }
    }
  }
  return doc.dump(2) + "\n";
}

AuxChannel parse_channel(std::string_view text) {
  return channel_from_json(parse_json(text, "channel document"));
}

std::string serialize_channel(const AuxChannel& channel) {
  return channel_to_json(channel).dump(2) + "\n";
}

SimulationPlan parse_simulation_plan(std::string_view text, std::uint64_t default_seed) {
  const json doc = parse_json(text, "simulation plan");
  if (!doc.is_object()) throw ValidationError("simulation plan must be an object");
  SimulationPlan plan;
  if (doc.contains("u_channel")) plan.u_channel = channel_from_json(doc["u_channel"]);
  if (doc.contains("v_channel")) plan.v_channel = channel_from_json(doc["v_channel"]);
  if (!doc.contains("rows") || !doc["rows"].is_array() || doc["rows"].empty()) {
    throw ValidationError("simulation plan needs a nonempty 'rows' array");
  }
  const CodebookSpec defaults;
  const json& rows = doc["rows"];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const json& row = rows[i];
    if (!row.is_object()) {
      throw ValidationError("plan row " + std::to_string(i) + " must be an object");
    }
    CodebookSpec s;
    s.block_length = size_field(row, "block_length", defaults.block_length, i);
    s.u_codeword_count = size_field(row, "u_codeword_count", defaults.u_codeword_count, i);
    s.v_codeword_count = size_field(row, "v_codeword_count", defaults.v_codeword_count, i);
    s.u_bin_count = size_field(row, "u_bin_count", defaults.u_bin_count, i);
    s.v_bin_count = size_field(row, "v_bin_count", defaults.v_bin_count, i);
    s.a_bin_count = size_field(row, "a_bin_count", defaults.a_bin_count, i);
    s.c_bin_count = size_field(row, "c_bin_count", defaults.c_bin_count, i);
    s.slack = number_field(row, "slack", defaults.slack, i);
    s.typicality_delta = number_field(row, "typicality_delta", defaults.typicality_delta, i);
    if (row.contains("seed")) {
      if (!row["seed"].is_number_unsigned() && !row["seed"].is_number_integer()) {
        throw ValidationError("plan row " + std::to_string(i) + ": 'seed' must be an integer");
      }
      s.seed = row["seed"].get<std::uint64_t>();
    } else {
      s.seed = default_seed;
    }
    if (row.contains("scheme")) {
      if (!row["scheme"].is_string()) {
        throw ValidationError("plan row " + std::to_string(i) + ": 'scheme' must be a string");
      }
      try {
        s.scheme = scheme_from_name(row["scheme"].get<std::string>());
      } catch (const ArgumentError& e) {
        throw ValidationError("plan row " + std::to_string(i) + ": " + e.what());
      }
    }
    for (const auto& [key, value] : row.items()) {
      static const char* known[] = {"block_length", "u_codeword_count", "v_codeword_count",
                                    "u_bin_count",  "v_bin_count",      "a_bin_count",
                                    "c_bin_count",  "slack",            "typicality_delta",
                                    "seed",         "scheme"};
      if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
        throw ValidationError("plan row " + std::to_string(i) + ": unexpected key '" + key + "'");
      }
    }
    try {
      s.validate();
    } catch (const ArgumentError& e) {
      throw ValidationError("plan row " + std::to_string(i) + ": " + e.what());
    }
    plan.rows.push_back(s);
  }
  return plan;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\n") == std::string::npos) {
      out += f;
      continue;
    }
    out += '"';
    for (char ch : f) {
      if (ch == '"') out += '"';
      out += ch;
    }
    out += '"';
  }
  out += '\n';
  return out;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string RunManifest::render() const {
  std::ostringstream os;
  os << "# tool: secdsc " << version() << '\n';
  os << "# command: " << command << '\n';
  for (const auto& [key, value] : config) os << "# config." << key << ": " << value << '\n';
  os << "# seed: " << (seed ? std::to_string(*seed) : std::string("none")) << '\n';
  char digest[17];
  std::snprintf(digest, sizeof digest, "%016llx",
                static_cast<unsigned long long>(input_digest));
  os << "# input_fnv1a64: " << digest << '\n';
  os << "# wall_clock: " << wall_clock << '\n';
  return os.str();
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace secdsc
