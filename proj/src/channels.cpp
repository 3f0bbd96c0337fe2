#include "qdisc/channels.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qdisc/exact_matrix.hpp"

namespace qdisc {

namespace {

SpaceStructure qubit_io() { return SpaceStructure{{"I", 2}, {"O", 2}}; }

void check_unit_interval(const Rational& x, const char* what) {
  if (x < 0 || x > 1) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

// Basis order |00>, |01>, |10>, |11> over (I, O).
template <class T>
LabeledMatrix<T> ad_pattern(const T& root_keep, const T& gamma, const T& keep) {
  DenseMatrix<T> m(4, 4);
  m(0, 0) = T(1);
  m(0, 3) = root_keep;
  m(3, 0) = root_keep;
  m(2, 2) = gamma;
  m(3, 3) = keep;
  return LabeledMatrix<T>(qubit_io(), std::move(m));
}

template <class T>
LabeledMatrix<T> bf_pattern(const T& stay, const T& flip) {
  DenseMatrix<T> m(4, 4);
  for (std::size_t i : {0u, 3u})
    for (std::size_t j : {0u, 3u}) m(i, j) = stay;
  for (std::size_t i : {1u, 2u})
    for (std::size_t j : {1u, 2u}) m(i, j) = flip;
  return LabeledMatrix<T>(qubit_io(), std::move(m));
}

template <class T>
LabeledMatrix<T> identity_pattern(std::size_t d) {
  DenseMatrix<T> m(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i * d + i, j * d + j) = T(1);
  return LabeledMatrix<T>(SpaceStructure{{"I", d}, {"O", d}}, std::move(m));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

FloatLabeled amplitude_damping(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("amplitude_damping: gamma must lie in [0, 1]");
  return ad_pattern<cplx>(std::sqrt(1.0 - gamma), gamma, 1.0 - gamma);
}

ExactLabeled amplitude_damping_exact(const Rational& gamma) {
  check_unit_interval(gamma, "amplitude_damping: gamma");
  const Rational keep = 1 - gamma;
  return ad_pattern<ExactComplex>(ExactComplex(QuadExt::sqrt_of(keep)), ExactComplex(gamma), ExactComplex(keep));
}

FloatLabeled bit_flip(double p, BitFlipConvention convention) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bit_flip: parameter must lie in [0, 1]");
  const double flip = convention == BitFlipConvention::FlipWithProbability ? p : 1.0 - p;
  return bf_pattern<cplx>(1.0 - flip, flip);
}

ExactLabeled bit_flip_exact(const Rational& p, BitFlipConvention convention) {
  check_unit_interval(p, "bit_flip: parameter");
  const Rational flip = convention == BitFlipConvention::FlipWithProbability ? p : Rational(1 - p);
  return bf_pattern<ExactComplex>(ExactComplex(Rational(1 - flip)), ExactComplex(flip));
}

FloatLabeled identity_channel(std::size_t d) { return identity_pattern<cplx>(d); }

ExactLabeled identity_channel_exact(std::size_t d) { return identity_pattern<ExactComplex>(d); }

FloatLabeled preparation_channel(const FloatMatrix& rho) {
  return FloatLabeled(SpaceStructure{{"I", 1}, {"O", rho.rows()}}, rho);
}

FloatMatrix random_density_matrix(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  FloatMatrix g(n, n);
  for (auto& z : g.data()) {
    const double re = normal(rng);
    const double im = normal(rng);
    z = cplx(re, im);
  }
  FloatMatrix a = g * g.adjoint();
  a /= cplx(a.trace().real());
  return hermitize(a);
}

FloatLabeled random_channel(std::size_t d_in, std::size_t d_out, std::mt19937_64& rng) {
  if (d_in < 1 || d_out < 1) throw std::invalid_argument("random_channel: dimensions must be positive");
  const SpaceStructure space{{"I", d_in}, {"O", d_out}};
  const std::size_t n = d_in * d_out;
  for (;;) {
    FloatLabeled a(space, random_density_matrix(n, rng));
    FloatLabeled c = a;
    c.entries -= trace_and_replace(a, {"O"}).entries;
    c.entries += FloatMatrix::identity(n) * cplx(1.0 / static_cast<double>(d_out));
    c.entries = hermitize(c.entries);
    if (min_eigenvalue(c.entries) >= 0.0) return c;
  }
}

FloatLabeled random_channel(std::size_t d_in, std::size_t d_out, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_channel(d_in, d_out, rng);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

ChannelSpec ChannelSpec::parse(const std::string& text) {
  ChannelSpec spec;
  spec.text = text;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string() : text.substr(colon + 1);
  if (kind == "ad" || kind == "bf") {
    if (arg.empty()) throw std::invalid_argument("channel spec '" + text + "': missing parameter");
    spec.kind = kind == "ad" ? Kind::AmplitudeDamping : Kind::BitFlip;
    spec.parameter = parse_rational(arg);
    check_unit_interval(spec.parameter, "channel parameter");
  } else if (kind == "random") {
    spec.kind = Kind::Random;
    if (arg.rfind("seed=", 0) != 0) throw std::invalid_argument("channel spec '" + text + "': expected random:seed=N");
    try {
      std::size_t used = 0;
      spec.seed = std::stoull(arg.substr(5), &used);
      if (used != arg.size() - 5) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::invalid_argument("channel spec '" + text + "': bad seed");
    }
  } else if (kind == "id" && arg.empty()) {
    spec.kind = Kind::Identity;
  } else {
    throw std::invalid_argument("unknown channel spec '" + text + "'");
  }
  return spec;
}

FloatLabeled ChannelSpec::to_float() const {
  switch (kind) {
    case Kind::AmplitudeDamping:
      return amplitude_damping(parameter.get_d());
    case Kind::BitFlip:
      return bit_flip(parameter.get_d());
    case Kind::Random:
      return random_channel(2, 2, seed);
    case Kind::Identity:
      break;
  }
  return identity_channel(2);
}

ExactLabeled ChannelSpec::to_exact() const {
  switch (kind) {
    case Kind::AmplitudeDamping:
      return amplitude_damping_exact(parameter);
    case Kind::BitFlip:
      return bit_flip_exact(parameter);
    case Kind::Random:
      throw std::logic_error("random channels have no exact flavour");
    case Kind::Identity:
      break;
  }
  return identity_channel_exact(2);
}

std::vector<ChannelSpec> parse_channel_list(const std::string& comma_separated) {
  std::vector<ChannelSpec> out;
  std::stringstream in(comma_separated);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(ChannelSpec::parse(item));
  }
  if (out.empty()) throw std::invalid_argument("empty channel list");
  return out;
}

bool is_valid_channel(const FloatLabeled& c, double tol) {
  if (c.space.size() != 2) return false;
  const std::string out_label = c.space.systems()[1].label;
  if (!is_hermitian(c.entries, tol)) return false;
  if (min_eigenvalue(hermitize(c.entries)) < -tol) return false;
  const FloatMatrix reduced = partial_trace(c, {out_label}).entries;
  const FloatMatrix id = FloatMatrix::identity(reduced.rows());
  for (std::size_t k = 0; k < id.data().size(); ++k)
    if (std::abs(reduced.data()[k] - id.data()[k]) > tol) return false;
  return true;
}

bool is_valid_channel_exact(const ExactLabeled& c) {
  if (c.space.size() != 2) return false;
  if (!is_hermitian(c.entries)) return false;
  const ExactMatrix reduced = partial_trace(c, {c.space.systems()[1].label}).entries;
  if (reduced != ExactMatrix::identity(reduced.rows())) return false;
  return is_psd_exact(c.entries);
}

Ensemble::Ensemble(std::vector<EnsembleMember> members, int copies) : members_(std::move(members)), copies_(copies) {
  if (members_.empty()) throw std::invalid_argument("Ensemble: no members");
  if (copies_ != 1 && copies_ != 2) throw std::invalid_argument("Ensemble: copies must be 1 or 2");
  Rational total = 0;
  for (const auto& m : members_) {
    if (m.prior < 0) throw std::invalid_argument("Ensemble: negative prior");
    total += m.prior;
  }
  if (total != 1) throw std::invalid_argument("Ensemble: priors sum to " + to_string(total) + ", not 1");
  d_in_ = members_[0].choi.space.systems().at(0).dim;
  d_out_ = members_[0].choi.space.systems().at(1).dim;
  for (const auto& m : members_) {
    if (m.choi.space.size() != 2 || m.choi.space.systems()[0].dim != d_in_ || m.choi.space.systems()[1].dim != d_out_) {
      throw std::invalid_argument("Ensemble: members do not share dimensions");
    }
    if (!is_valid_channel(m.choi)) throw std::invalid_argument("Ensemble: '" + m.spec + "' is not a valid channel");
    if (m.exact) {
      if (!is_valid_channel_exact(*m.exact)) {
        throw std::invalid_argument("Ensemble: exact twin of '" + m.spec + "' is not a valid channel");
      }
    }
  }
}

bool Ensemble::has_exact() const {
  for (const auto& m : members_)
    if (!m.exact) return false;
  return true;
}

const ExactLabeled& Ensemble::exact_choi(std::size_t i) const {
  if (!members_[i].exact) throw std::logic_error("Ensemble: member '" + members_[i].spec + "' has no exact flavour");
  return *members_[i].exact;
}

std::vector<std::string> slot_labels(int copies) {
  if (copies == 1) return {"I1", "O1"};
  return {"I1", "O1", "I2", "O2"};
}

namespace {

template <class T>
LabeledMatrix<T> tensor_power(const LabeledMatrix<T>& c, int copies) {
  LabeledMatrix<T> first = relabel(c, {"I1", "O1"});
  if (copies == 1) return first;
  return kron(first, relabel(c, {"I2", "O2"}));
}

}  // namespace

FloatLabeled Ensemble::power(std::size_t i) const { return tensor_power(members_[i].choi, copies_); }

ExactLabeled Ensemble::exact_power(std::size_t i) const { return tensor_power(exact_choi(i), copies_); }

std::string Ensemble::spec() const {
  std::string out;
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (i) out += ",";
    out += members_[i].spec + "@" + to_string(members_[i].prior);
  }
  return out;
}

Ensemble make_ensemble(const std::vector<ChannelSpec>& channels, const std::vector<Rational>& priors, int copies) {
  if (channels.size() != priors.size()) throw std::invalid_argument("make_ensemble: one prior per channel required");
  std::vector<EnsembleMember> members;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    EnsembleMember m{priors[i], channels[i].to_float(), std::nullopt, channels[i].text};
    if (channels[i].has_exact()) m.exact = channels[i].to_exact();
    members.push_back(std::move(m));
  }
  return Ensemble(std::move(members), copies);
}

Ensemble make_ensemble(const std::vector<FloatLabeled>& chois, const std::vector<Rational>& priors, int copies) {
  if (chois.size() != priors.size()) throw std::invalid_argument("make_ensemble: one prior per channel required");
  std::vector<EnsembleMember> members;
  for (std::size_t i = 0; i < chois.size(); ++i) {
    members.push_back(EnsembleMember{priors[i], chois[i], std::nullopt, "choi#" + std::to_string(i)});
  }
  return Ensemble(std::move(members), copies);
}

}  // namespace qdisc
