#pragma once

// Attacks on the voting schemes and the detection procedures against them.
// Attacks append the events of their runs to `transcript` when one is given.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qvote/protocols.hpp"

namespace qvote {

enum class Verdict { Clean, Cheating, Inconclusive };
std::string_view to_string(Verdict v);

struct AttackReport {
  std::string attack;
  Json inferred = Json::object();
  std::vector<std::size_t> histogram;  // authority-side outcome counts
  std::vector<bool> detections;        // per trial
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  Json details = Json::object();

  double detection_rate() const;
  Json to_json() const;
};

/// Colluders i < j (0-based) read the travelling qudit computationally:
/// i right after casting its own vote, j on receipt before casting. The
/// inferred count (k_j - k_i) mod d is the number of YES votes strictly
/// between them. `histogram` holds the Bell phase index s of the authority's
/// measurement (uniform once the ballot has collapsed); details.tally_histogram
/// holds the difference-decoder tallies.
AttackReport collusion_attack_tb(const BallotConfig& config, const VoteVector& votes,
                                 std::pair<std::size_t, std::size_t> colluders, std::size_t trials,
                                 Rng& rng, Transcript* transcript = nullptr);

/// Plain DB run in which `cheater` applies U_yes `extra` more times.
RunResult multi_vote_plain(const BallotConfig& config, const VoteVector& votes, std::size_t cheater,
                           std::size_t extra, Rng& rng);

/// In every repetition the cheater casts |psi(theta_y + eps)> in place of the
/// issued voting qudit, eps uniform in [-pi scale / d, pi scale / d] and drawn
/// fresh each time. `votes[cheater]` is the nominal (issued) choice.
AttackReport phase_estimate_attack(const BallotConfig& config, const VoteVector& votes,
                                   std::size_t cheater, double error_scale, std::size_t trials,
                                   Rng& rng, std::size_t repetitions = kDefaultRepetitions,
                                   Transcript* transcript = nullptr);

/// The authority distributes the product |psi(0)>^N (or, with
/// `honest_control`, the entangled ballot) and reads each returned qudit in
/// the {|psi(2 pi l / d)>} basis. details.identification_accuracy is the exact
/// mean probability of reading each voter's vote correctly. `histogram` counts
/// voters identified per trial; a trial counts as detected when the voters'
/// subset-correlation test on one sacrificed ballot (all sites) fails.
AttackReport authority_product_ballot(const BallotConfig& config, const VoteVector& votes,
                                      std::size_t trials, Rng& rng, bool honest_control = false,
                                      Transcript* transcript = nullptr);

/// Mean over voters of P(Fourier readout of voter i's qudit = its vote weight).
double identification_accuracy(const PureState& returned, const VoteVector& votes);

/// Per-voter issued angles (theta_yes^(i), theta_no^(i)) in a voting-qudit run.
/// details: decoded tally and p, the per-voter tags (theta_yes^(i) - theta_no)
/// in lattice units, and the symmetry-test verdict on the pooled YES states.
AttackReport mismatched_voting_states(const BallotConfig& config,
                                      const std::vector<std::pair<double, double>>& per_voter_thetas,
                                      const VoteVector& votes, Rng& rng,
                                      std::size_t repetitions = kDefaultRepetitions,
                                      std::size_t symmetry_comparisons = 7,
                                      Transcript* transcript = nullptr);

struct SymmetryResult {
  Verdict verdict = Verdict::Clean;
  std::size_t comparisons = 0;
  std::size_t failures = 0;
  double pass_probability = 1.0;  // exact probability that every comparison passes
};

/// Swap tests on fresh pairs, cycling through all pairs of `states`.
SymmetryResult detect_symmetry(const std::vector<PureState>& states, Rng& rng,
                               std::size_t comparisons);

struct CorrelationResult {
  Verdict verdict = Verdict::Clean;
  std::size_t trials = 0;
  std::size_t unequal_trials = 0;
};

/// Computational readout of `subset` on fresh copies of the ballot.
CorrelationResult detect_subset_correlation(const PureState& ballot,
                                            const std::vector<std::size_t>& subset, Rng& rng,
                                            std::size_t trials);

Verdict detect_inconsistent_results(const std::vector<Tally>& outcomes);

}  // namespace qvote
