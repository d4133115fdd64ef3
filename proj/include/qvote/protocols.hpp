#pragma once

// End-to-end protocol runs and the classical baselines.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "qvote/ballots.hpp"
#include "qvote/transcript.hpp"

namespace qvote {

struct RunResult {
  Tally tally;
  std::vector<Tally> repetitions;
  Transcript transcript{"run"};
  Json statistics = Json::object();

  Json to_json() const;
};

Json to_json(const Tally& tally);
Tally tally_from_json(const Json& j);
Json to_json(const BallotConfig& config);

/// Optional adversary access to the ballot between voters.
struct DbHooks {
  std::function<void(std::size_t voter, PureState& state, Rng& rng)> after_vote;
};

struct TbHooks {
  std::function<void(std::size_t voter, PureState& state, Rng& rng)> before_vote;
  std::function<void(std::size_t voter, PureState& state, Rng& rng)> after_vote;
  /// Sees the ballot as the authority receives it, before decoding.
  std::function<void(const PureState& state)> on_return;
};

struct SecureHooks {
  /// Voting qudit the voter actually casts in repetition `rep`. The default
  /// is the issued |psi(theta_y)> or |psi(theta_no)>.
  std::function<PureState(std::size_t voter, std::size_t rep, const VoteChoice& choice, Rng& rng)>
      cast_state;
};

inline constexpr std::size_t kDefaultRepetitions = 3;

RunResult run_db_vote(const BallotConfig& config, const VoteVector& votes, Rng& rng,
                      const DbHooks& hooks = {});
RunResult run_tb_vote(const BallotConfig& config, const VoteVector& votes, Rng& rng,
                      const TbHooks& hooks = {});
/// R independent executions; the result is the common tally if every
/// repetition decodes to the same valid p, otherwise CheatDetected.
RunResult run_secure_vote(const BallotConfig& config, const VoteVector& votes, Rng& rng,
                          std::size_t repetitions = kDefaultRepetitions,
                          const SecureHooks& hooks = {});
RunResult run_survey(const BallotConfig& config, const std::vector<std::size_t>& euros, Rng& rng);

// ---------------------------------------------------------------------------
// Classical baselines

/// coins[j][k] = coins[k][j] in {0, 1}; the diagonal is ignored.
using CoinTable = std::vector<std::vector<int>>;

struct DiningResult {
  std::vector<int> announcements;
  int parity = 0;
  bool nsa_paid = true;
};

DiningResult classical_dining(std::size_t n, std::optional<std::size_t> payer, Rng& rng);
DiningResult classical_dining(std::size_t n, std::optional<std::size_t> payer, const CoinTable& coins);

/// keys[j][k] = -keys[k][j]; arithmetic is mod N + 1 so that all-yes does not
/// alias with zero.
using KeyTable = std::vector<std::vector<long>>;

struct ModularVoteResult {
  std::vector<long> announcements;
  std::size_t modulus = 0;
  std::size_t total = 0;
};

ModularVoteResult classical_modular_vote(const std::vector<int>& votes, Rng& rng);
ModularVoteResult classical_modular_vote(const std::vector<int>& votes, const KeyTable& keys);

}  // namespace qvote
