#include "secdsc/prob.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "secdsc/error.hpp"
#include "summation.hpp"

namespace secdsc {

namespace {

constexpr double kNoiseFloor = 1e-12;

void require_known(const Distribution& dist, VarSet vars) {
  if (!vars.subset_of(dist.labels())) {
    throw LabelError("labels {" + (vars - dist.labels()).to_string() +
                     "} not present in distribution over {" +
                     dist.labels().to_string() + "}");
  }
}

void require_disjoint(VarSet x, VarSet y, std::string_view what) {
  if (!x.disjoint(y)) {
    throw ArgumentError(std::string(what) + " overlap on {" +
                        (x & y).to_string() + "}");
  }
}

double entropy_of(std::span<const double> probs) {
  NeumaierSum sum;
  for (double p : probs) {
    if (p > 0.0) sum.add(-p * std::log2(p));
  }
  return sum.value();
}

}  // namespace

char to_char(Var v) noexcept {
  static constexpr std::array<char, kVarCount> kNames = {'U', 'A', 'B',
                                                         'C', 'E', 'V'};
  return kNames[static_cast<std::size_t>(v)];
}

std::optional<Var> var_from_char(char c) noexcept {
  switch (c) {
    case 'U': return Var::U;
    case 'A': return Var::A;
    case 'B': return Var::B;
    case 'C': return Var::C;
    case 'E': return Var::E;
    case 'V': return Var::V;
    default: return std::nullopt;
  }
}

VarSet::VarSet(std::initializer_list<Var> vars) {
  for (Var v : vars) {
    if (contains(v)) {
      throw ArgumentError(std::string("duplicate label ") + to_char(v));
    }
    bits_ |= static_cast<std::uint8_t>(1U << static_cast<unsigned>(v));
  }
}

VarSet VarSet::parse(std::string_view text) {
  VarSet s;
  for (char c : text) {
    if (c == ',' || c == ' ') continue;
    auto v = var_from_char(c);
    if (!v) throw LabelError(std::string("unknown label '") + c + "'");
    if (s.contains(*v)) {
      throw ArgumentError(std::string("duplicate label ") + c);
    }
    s = s | VarSet{*v};
  }
  return s;
}

std::size_t VarSet::size() const {
  return static_cast<std::size_t>(std::bitset<8>(bits_).count());
}

std::vector<Var> VarSet::members() const {
  std::vector<Var> out;
  for (std::size_t i = 0; i < kVarCount; ++i) {
    if ((bits_ >> i) & 1U) out.push_back(static_cast<Var>(i));
  }
  return out;
}

std::string VarSet::to_string() const {
  std::string out;
  for (Var v : members()) {
    if (!out.empty()) out += ',';
    out += to_char(v);
  }
  return out;
}

Distribution::Distribution(VarSet labels, std::vector<std::size_t> dims,
                           std::vector<double> pmf)
    : labels_(labels), axes_(labels.members()), dims_(std::move(dims)),
      pmf_(std::move(pmf)) {
  if (axes_.empty()) throw ShapeError("distribution needs at least one axis");
  if (dims_.size() != axes_.size()) {
    throw ShapeError("expected " + std::to_string(axes_.size()) +
                     " cardinalities, got " + std::to_string(dims_.size()));
  }
  std::size_t total = 1;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i] == 0) {
      throw ShapeError(std::string("cardinality of ") + to_char(axes_[i]) +
                       " must be >= 1");
    }
    total *= dims_[i];
  }
  if (pmf_.size() != total) {
    throw ShapeError("pmf has " + std::to_string(pmf_.size()) +
                     " entries, expected " + std::to_string(total));
  }
  NeumaierSum mass;
  for (std::size_t i = 0; i < pmf_.size(); ++i) {
    if (!(pmf_[i] >= 0.0) || !std::isfinite(pmf_[i])) {
      throw ValidationError("pmf entry " + std::to_string(i) +
                            " is negative or not finite");
    }
    mass.add(pmf_[i]);
  }
  if (std::abs(mass.value() - 1.0) > kMassTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "pmf sums to " << mass.value() << ", expected 1";
    throw ValidationError(os.str());
  }
}

std::size_t Distribution::axis_of(Var v) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (axes_[i] == v) return i;
  }
  throw LabelError(std::string("label ") + to_char(v) +
                   " not present in distribution");
}

std::size_t Distribution::cardinality(Var v) const {
  return dims_[axis_of(v)];
}

std::size_t Distribution::cardinality(VarSet vars) const {
  require_known(*this, vars);
  std::size_t n = 1;
  for (Var v : vars.members()) n *= cardinality(v);
  return n;
}

double Distribution::at(std::span<const std::size_t> index) const {
  if (index.size() != dims_.size()) {
    throw ShapeError("index rank does not match distribution rank");
  }
  std::size_t flat = 0;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (index[i] >= dims_[i]) throw ShapeError("index out of range");
    flat = flat * dims_[i] + index[i];
  }
  return pmf_[flat];
}

std::vector<double> Distribution::marginal_pmf(VarSet vars) const {
  require_known(*this, vars);
  // Stride of each axis inside the marginal tensor (0 for summed axes).
  std::vector<std::size_t> stride(dims_.size(), 0);
  std::size_t out_size = 1;
  for (std::size_t i = dims_.size(); i-- > 0;) {
    if (vars.contains(axes_[i])) {
      stride[i] = out_size;
      out_size *= dims_[i];
    }
  }
  std::vector<double> out(out_size, 0.0);
  if (vars.empty()) {
    out[0] = 1.0;
    return out;
  }
  std::vector<std::size_t> digit(dims_.size(), 0);
  std::size_t target = 0;
  for (std::size_t flat = 0; flat < pmf_.size(); ++flat) {
    out[target] += pmf_[flat];
    for (std::size_t i = dims_.size(); i-- > 0;) {
      ++digit[i];
      target += stride[i];
      if (digit[i] < dims_[i]) break;
      target -= stride[i] * dims_[i];
      digit[i] = 0;
    }
  }
  return out;
}

double Distribution::joint_entropy(VarSet vars) const {
  if (vars.empty()) return 0.0;
  if (vars == labels_) return entropy_of(pmf_);
  return entropy_of(marginal_pmf(vars));
}

JointDistribution::JointDistribution(std::array<std::size_t, 4> dims,
                                     std::vector<double> pmf)
    : Distribution(kSourceVars, std::vector<std::size_t>(dims.begin(), dims.end()),
                   std::move(pmf)) {}

JointDistribution::JointDistribution(Distribution dist)
    : Distribution(std::move(dist)) {
  if (labels() != kSourceVars) {
    throw ShapeError("source distribution must be over exactly {A,B,C,E}, got {" +
                     labels().to_string() + "}");
  }
}

JointDistribution JointDistribution::uniform(std::array<std::size_t, 4> dims) {
  const std::size_t n = dims[0] * dims[1] * dims[2] * dims[3];
  return JointDistribution(dims, std::vector<double>(n, 1.0 / double(n)));
}

double JointDistribution::p(std::size_t a, std::size_t b, std::size_t c,
                            std::size_t e) const {
  return at({a, b, c, e});
}

std::array<std::size_t, 4> JointDistribution::source_dims() const {
  return {dims()[0], dims()[1], dims()[2], dims()[3]};
}

Distribution marginalize(const Distribution& dist, VarSet keep) {
  if (keep.empty()) throw ArgumentError("marginalize: keep set is empty");
  require_known(dist, keep);
  std::vector<std::size_t> dims;
  for (Var v : keep.members()) dims.push_back(dist.cardinality(v));
  return Distribution(keep, std::move(dims), dist.marginal_pmf(keep));
}

double entropy(const Distribution& dist, VarSet x, VarSet given) {
  require_disjoint(x, given, "entropy: target and conditioning sets");
  require_known(dist, x | given);
  if (x.empty()) return 0.0;
  const double h = dist.joint_entropy(x | given) - dist.joint_entropy(given);
  return h < 0.0 ? 0.0 : h;
}

double mutual_information(const Distribution& dist, VarSet x, VarSet y,
                          VarSet given) {
  require_disjoint(x, y, "mutual_information: X and Y");
  require_disjoint(x, given, "mutual_information: X and conditioning set");
  require_disjoint(y, given, "mutual_information: Y and conditioning set");
  require_known(dist, x | y | given);
  if (x.empty() || y.empty()) return 0.0;
  const double i = dist.joint_entropy(x | given) +
                   dist.joint_entropy(y | given) -
                   dist.joint_entropy(x | y | given) -
                   dist.joint_entropy(given);
  return (i < 0.0 && i >= -kNoiseFloor) ? 0.0 : i;
}

bool is_markov_chain(const Distribution& dist, VarSet x, VarSet y, VarSet z,
                     double tol) {
  require_disjoint(x, y, "is_markov_chain: X and Y");
  require_disjoint(y, z, "is_markov_chain: Y and Z");
  require_disjoint(x, z, "is_markov_chain: X and Z");
  return mutual_information(dist, x, z, y) <= tol;
}

Entropies::Entropies(const Distribution& dist) : dist_(dist) {}

double Entropies::joint(VarSet vars) {
  const auto key = vars.bits();
  if (!known_[key]) {
    cache_[key] = dist_.joint_entropy(vars);
    known_[key] = true;
  }
  return cache_[key];
}

double Entropies::h(VarSet x, VarSet given) {
  require_disjoint(x, given, "entropy: target and conditioning sets");
  if (x.empty()) return 0.0;
  const double v = joint(x | given) - joint(given);
  return v < 0.0 ? 0.0 : v;
}

double Entropies::mi(VarSet x, VarSet y, VarSet given) {
  require_disjoint(x, y, "mutual_information: X and Y");
  require_disjoint(x | y, given, "mutual_information: arguments and conditioning set");
  if (x.empty() || y.empty()) return 0.0;
  const double v =
      joint(x | given) + joint(y | given) - joint(x | y | given) - joint(given);
  return (v < 0.0 && v >= -kNoiseFloor) ? 0.0 : v;
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace secdsc
