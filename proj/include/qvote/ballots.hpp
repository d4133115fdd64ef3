#pragma once

// Ballot states, voting operators and the authority-side decoders.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qvote/qstate.hpp"
#include "qvote/rng.hpp"

namespace qvote {

enum class Scheme { TravellingBallot, DistributedBallot, Secure, Survey };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view text);

/// Authority secrets of the voting-qudit scheme:
/// theta_yes = 2 pi l_yes / d + delta, theta_no = 2 pi l_no / d + delta.
struct Secrets {
  std::size_t l_yes = 1;
  std::size_t l_no = 0;
  double delta = 0.0;

  long step() const { return static_cast<long>(l_yes) - static_cast<long>(l_no); }
};

struct BallotConfig {
  std::size_t d = 3;
  std::size_t n = 2;
  Scheme scheme = Scheme::DistributedBallot;
  std::optional<Secrets> secrets;               // Secure only
  std::optional<std::size_t> survey_max_total;  // Survey only

  /// Throws ConfigError on any violated constraint.
  void validate() const;

  double theta_yes() const;
  double theta_no() const;
};

/// Uniform draw of valid secrets for (d, n): l_yes, l_no uniform with
/// l_yes != l_no and |l_yes - l_no| * n < d, delta uniform in [0, 2 pi / d).
Secrets draw_secrets(std::size_t d, std::size_t n, Rng& rng);

/// A voter's choice: YES/NO, or a non-negative multiplicity for surveys.
class VoteChoice {
 public:
  static VoteChoice yes() { return VoteChoice(1, false); }
  static VoteChoice no() { return VoteChoice(0, false); }
  static VoteChoice count(std::size_t n) { return VoteChoice(n, true); }

  /// Number of phase-vote applications this choice stands for.
  std::size_t weight() const { return weight_; }
  bool is_yes() const { return weight_ > 0; }
  bool is_multiplicity() const { return multiplicity_; }

  std::string to_string() const;
  friend bool operator==(const VoteChoice&, const VoteChoice&) = default;

 private:
  VoteChoice(std::size_t weight, bool multiplicity) : weight_(weight), multiplicity_(multiplicity) {}
  std::size_t weight_;
  bool multiplicity_;
};

using VoteVector = std::vector<VoteChoice>;

/// Parses "YNYY" (case-insensitive) into YES/NO choices.
VoteVector parse_votes(std::string_view text);
std::size_t tally(const VoteVector& votes);

// ---------------------------------------------------------------------------
// States and operators

PureState prepare_db_ballot(std::size_t d, std::size_t n);
PureState prepare_tb_ballot(std::size_t d);

/// |Omega_m> = (1/sqrt d) sum_k e^{i 2 pi m k / d} |k>^{(x) sites}
PureState tally_state(std::size_t d, std::size_t sites, std::size_t m);

/// sum_k e^{i 2 pi k / d} |k><k|
LocalUnitary phase_vote_unitary(std::size_t d);
/// |k> -> |k + 1 mod d>
LocalUnitary shift_unitary(std::size_t d);

/// |psi(theta)> = (1/sqrt d) sum_k e^{i k theta} |k>
PureState voting_qudit_state(std::size_t d, double theta);

PureState cast_vote_db(const PureState& state, std::size_t voter_site, const VoteChoice& choice,
                       std::size_t repeat = 1);

template <typename State>
struct SecureCast {
  State state;
  std::size_t r;
  double probability;
};

/// Voter-side step of the voting-qudit scheme: appends `voting_state` as a new
/// last site, measures {P_r} on (ballot_site, new site) and applies the
/// correction V_r to the voting site.
///   P_r = sum_j |j + r><j + r|_b (x) |j><j|_v,   V_r = sum_j |j + r><j|_v
SecureCast<PureState> cast_vote_secure(const PureState& state, std::size_t ballot_site,
                                       const PureState& voting_state, Rng& rng);
SecureCast<CorrelatedState> cast_vote_secure(const CorrelatedState& state,
                                             const PureState& voting_state, Rng& rng);

/// {P_r} on a (ballot, voting) qudit pair.
ProjectorSet secure_vote_projectors(std::size_t d);
/// V_r on the voting qudit.
LocalUnitary secure_correction(std::size_t d, std::size_t r);

// ---------------------------------------------------------------------------
// Decoders

enum class TallyStatus { Ok, Invalid, CheatDetected };

struct Tally {
  TallyStatus status = TallyStatus::Ok;
  std::size_t m = 0;
  std::optional<std::size_t> p;  // raw phase index, voting-qudit scheme only

  bool ok() const { return status == TallyStatus::Ok; }
  friend bool operator==(const Tally&, const Tally&) = default;
};

std::string to_string(const Tally& tally);

/// {|Omega_m><Omega_m|, m = 0..d-1} on `sites` qudits.
ProjectorSet db_tally_projectors(std::size_t d, std::size_t sites);
/// {sum_k |k><k| (x) |k + r><k + r|, r = 0..d-1}: the cyclic difference of
/// site 1 relative to site 0.
ProjectorSet tb_difference_projectors(std::size_t d);
/// Generalized Bell basis (1/sqrt d) sum_k e^{i 2 pi s k / d} |k>|k + t>,
/// outcome index t * d + s.
ProjectorSet bell_projectors(std::size_t d);

Tally decode_db(const PureState& state, std::size_t d, std::size_t n, Rng& rng);
Tally decode_tb(const PureState& state, std::size_t d, Rng& rng);
/// Voting-qudit decoder. Removes the known baseline phase e^{ik N theta_no},
/// then measures the phase index p and maps it back to a tally.
///
/// The voter-side shift is taken mod d, so a voting qudit contributes
/// e^{i d theta} = e^{i d delta} to every coefficient k < r. That factor does
/// not depend on the vote, and r is uniform whatever the voting state, so
/// voters announce r and the authority removes the factor here. An empty
/// `announced_shifts` skips that step.
Tally decode_secure(const PureState& state, const BallotConfig& config,
                    std::span<const std::size_t> announced_shifts, Rng& rng);
Tally decode_secure(const CorrelatedState& state, const BallotConfig& config,
                    std::span<const std::size_t> announced_shifts, Rng& rng);

/// Outcome distribution of the voting-qudit decoder, before sampling:
/// entry p for p = 0..d-1, then the complement.
std::vector<double> secure_phase_distribution(const CorrelatedState& state,
                                              const BallotConfig& config,
                                              std::span<const std::size_t> announced_shifts);

/// Tally m from a phase index p: smallest m in [0, d) with m * step = p mod d.
std::optional<std::size_t> tally_from_phase(std::size_t p, long step, std::size_t d);

/// Two-voter, d = 3 travelling-ballot labels: 0 refusal, 1 undecided,
/// 2 acceptance.
std::string_view tb_two_voter_label(std::size_t m);

}  // namespace qvote
