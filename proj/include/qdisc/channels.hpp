#pragma once

// Channel zoo and ensembles. Every Choi operator lives on (I, O) with the
// convention C = sum_ij |i><j| (x) Phi(|i><j|), so Tr_O C = 1_I.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qdisc/exact_scalar.hpp"
#include "qdisc/tensor.hpp"

namespace qdisc {

// Which weight the bit-flip parameter carries.
enum class BitFlipConvention {
  FlipWithProbability,  // rho -> (1 - p) rho + p X rho X
  KeepWithProbability,  // rho -> p rho + (1 - p) X rho X
};

// Fixed by running the certification pipeline on AD(67/100) vs BF(87/100)
// under both conventions; see the README.
inline constexpr BitFlipConvention kDefaultBitFlipConvention = BitFlipConvention::KeepWithProbability;

// Kraus K0 = |0><0| + sqrt(1-gamma)|1><1|, K1 = sqrt(gamma)|0><1|.
FloatLabeled amplitude_damping(double gamma);
ExactLabeled amplitude_damping_exact(const Rational& gamma);

FloatLabeled bit_flip(double p, BitFlipConvention convention = kDefaultBitFlipConvention);
ExactLabeled bit_flip_exact(const Rational& p, BitFlipConvention convention = kDefaultBitFlipConvention);

FloatLabeled identity_channel(std::size_t d);
ExactLabeled identity_channel_exact(std::size_t d);

// Choi of the channel that discards a trivial (dimension 1) input and prepares
// rho, i.e. rho itself on (I:1, O:d).
FloatLabeled preparation_channel(const FloatMatrix& rho);

// Hilbert-Schmidt random density matrix: G G^dagger / Tr(G G^dagger) with G
// complex Ginibre.
FloatMatrix random_density_matrix(std::size_t n, std::mt19937_64& rng);

// Random channel by projection of a Hilbert-Schmidt random matrix onto the
// channel affine space, C = A - _O A + 1/d_O, rejection-resampled until PSD.
FloatLabeled random_channel(std::size_t d_in, std::size_t d_out, std::mt19937_64& rng);
FloatLabeled random_channel(std::size_t d_in, std::size_t d_out, std::uint64_t seed);

// Independent, reproducible seed for task `index` of a run with `master` seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// CLI channel description: "ad:0.67", "bf:87/100", "random:seed=7",
// "id" (qubit identity).
struct ChannelSpec {
  enum class Kind { AmplitudeDamping, BitFlip, Random, Identity };
  Kind kind = Kind::Identity;
  Rational parameter = 0;
  std::uint64_t seed = 0;
  std::string text;

  static ChannelSpec parse(const std::string& text);
  bool has_exact() const { return kind != Kind::Random; }
  FloatLabeled to_float() const;
  ExactLabeled to_exact() const;  // throws std::logic_error for random channels
};

std::vector<ChannelSpec> parse_channel_list(const std::string& comma_separated);

bool is_valid_channel(const FloatLabeled& c, double tol = 1e-10);
bool is_valid_channel_exact(const ExactLabeled& c);

struct EnsembleMember {
  Rational prior;
  FloatLabeled choi;
  std::optional<ExactLabeled> exact;
  std::string spec;
};

class Ensemble {
 public:
  // Validates: priors non-negative and summing exactly to 1, every Choi a
  // valid channel, shared dims, copies in {1, 2}. Throws std::invalid_argument.
  Ensemble(std::vector<EnsembleMember> members, int copies);

  std::size_t size() const { return members_.size(); }
  int copies() const { return copies_; }
  std::size_t d_in() const { return d_in_; }
  std::size_t d_out() const { return d_out_; }

  const Rational& prior_exact(std::size_t i) const { return members_[i].prior; }
  double prior(std::size_t i) const { return members_[i].prior.get_d(); }
  const FloatLabeled& choi(std::size_t i) const { return members_[i].choi; }
  const EnsembleMember& member(std::size_t i) const { return members_[i]; }

  bool has_exact() const;
  const ExactLabeled& exact_choi(std::size_t i) const;

  // C_i^{(x)k} on (I1, O1[, I2, O2]).
  FloatLabeled power(std::size_t i) const;
  ExactLabeled exact_power(std::size_t i) const;

  // "spec@prior,spec@prior,..."
  std::string spec() const;

 private:
  std::vector<EnsembleMember> members_;
  int copies_ = 2;
  std::size_t d_in_ = 0;
  std::size_t d_out_ = 0;
};

// Builds an ensemble from CLI specs and prior strings.
Ensemble make_ensemble(const std::vector<ChannelSpec>& channels, const std::vector<Rational>& priors, int copies);

// Ensemble over plain float Chois (no exact twin).
Ensemble make_ensemble(const std::vector<FloatLabeled>& chois, const std::vector<Rational>& priors, int copies);

// Slot labels for copy `slot` (0-based): ("I1","O1"), ("I2","O2").
std::vector<std::string> slot_labels(int copies);

}  // namespace qdisc
