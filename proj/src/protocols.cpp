#include "qvote/protocols.hpp"

#include <cmath>
#include <numeric>

#include "qvote/errors.hpp"

namespace qvote {

namespace {

void require_votes(const BallotConfig& config, std::size_t count, Scheme scheme) {
  if (config.scheme != scheme)
    throw ConfigError("expected scheme '" + std::string(to_string(scheme)) + "', got '" +
                      std::string(to_string(config.scheme)) + "'");
  config.validate();
  if (count != config.n)
    throw ConfigError("expected " + std::to_string(config.n) + " votes, got " + std::to_string(count));
}

Transcript start_transcript(const BallotConfig& config, const Rng& rng) {
  Transcript t(run_id(rng.seed()));
  t.add(EventKind::Config, std::nullopt, std::nullopt,
        Json{{"config", to_json(config)}, {"seed", rng.seed()}});
  return t;
}

void finish(RunResult& result) {
  result.transcript.add(EventKind::Result, std::nullopt, std::nullopt, Json::object(),
                        to_json(result.tally));
}

Json vote_payload(const VoteChoice& choice, Rng& salts) {
  return Json{{"commitment", commitment(choice.to_string(), salts.next_u64())}};
}

// Shared body of the phase-voting (DB and survey) runs.
RunResult run_phase_ballot(const BallotConfig& config, const VoteVector& votes, Rng& rng,
                           const DbHooks& hooks) {
  RunResult result;
  result.transcript = start_transcript(config, rng);
  Transcript& tr = result.transcript;
  Rng measure = rng.split("measure");
  Rng salts = rng.split("salt");
  Rng hook_rng = rng.split("hook");

  PureState state = prepare_db_ballot(config.d, config.n);
  tr.add(EventKind::Prepare, 0, std::nullopt, Json{{"ballot", "Omega_0"}, {"sites", config.n}});
  for (std::size_t i = 0; i < config.n; ++i) tr.add(EventKind::Distribute, 0, i);
  for (std::size_t i = 0; i < config.n; ++i) {
    state = cast_vote_db(state, i, votes[i]);
    if (hooks.after_vote) hooks.after_vote(i, state, hook_rng);
    tr.add(EventKind::Vote, 0, i, vote_payload(votes[i], salts));
  }
  for (std::size_t i = 0; i < config.n; ++i) tr.add(EventKind::Return, 0, i);
  result.tally = decode_db(state, config.d, config.n, measure);
  result.repetitions = {result.tally};
  tr.add(EventKind::Measure, 0, std::nullopt, Json{{"decoder", "tally"}}, to_json(result.tally));
  finish(result);
  return result;
}

}  // namespace

Json to_json(const Tally& tally) {
  Json j = Json::object();
  switch (tally.status) {
    case TallyStatus::Ok: j["status"] = "ok"; break;
    case TallyStatus::Invalid: j["status"] = "invalid"; break;
    case TallyStatus::CheatDetected: j["status"] = "cheat_detected"; break;
  }
  j["m"] = tally.m;
  j["p"] = tally.p ? Json(*tally.p) : Json(nullptr);
  return j;
}

Tally tally_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("status") || !j.contains("m") || !j.contains("p"))
    throw ConfigError("tally must be an object with status, m and p");
  Tally t;
  const std::string status = j["status"].get<std::string>();
  if (status == "ok") t.status = TallyStatus::Ok;
  else if (status == "invalid") t.status = TallyStatus::Invalid;
  else if (status == "cheat_detected") t.status = TallyStatus::CheatDetected;
  else throw ConfigError("unknown tally status '" + status + "'");
  if (!j["m"].is_number_unsigned()) throw ConfigError("tally 'm' must be a non-negative integer");
  t.m = j["m"].get<std::size_t>();
  if (!j["p"].is_null()) {
    if (!j["p"].is_number_unsigned()) throw ConfigError("tally 'p' must be a non-negative integer");
    t.p = j["p"].get<std::size_t>();
  }
  return t;
}

Json to_json(const BallotConfig& config) {
  Json j{{"scheme", to_string(config.scheme)}, {"d", config.d}, {"n", config.n}};
  if (config.secrets)
    j["secrets"] = Json{{"l_yes", config.secrets->l_yes},
                        {"l_no", config.secrets->l_no},
                        {"delta", config.secrets->delta}};
  if (config.survey_max_total) j["survey_max_total"] = *config.survey_max_total;
  return j;
}

Json RunResult::to_json() const {
  Json reps = Json::array();
  for (const Tally& t : repetitions) reps.push_back(qvote::to_json(t));
  return Json{{"run_id", transcript.run_id()},
              {"result", qvote::to_json(tally)},
              {"repetitions", std::move(reps)},
              {"statistics", statistics}};
}

RunResult run_db_vote(const BallotConfig& config, const VoteVector& votes, Rng& rng,
                      const DbHooks& hooks) {
  require_votes(config, votes.size(), Scheme::DistributedBallot);
  return run_phase_ballot(config, votes, rng, hooks);
}

RunResult run_survey(const BallotConfig& config, const std::vector<std::size_t>& euros, Rng& rng) {
  require_votes(config, euros.size(), Scheme::Survey);
  const std::size_t total = std::accumulate(euros.begin(), euros.end(), std::size_t{0});
  if (total >= config.d)
    throw ConfigError("survey total " + std::to_string(total) + " must be < d = " +
                      std::to_string(config.d));
  if (config.survey_max_total && total > *config.survey_max_total)
    throw ConfigError("survey total exceeds the declared maximum");
  VoteVector votes;
  for (std::size_t e : euros) votes.push_back(VoteChoice::count(e));
  return run_phase_ballot(config, votes, rng, {});
}

RunResult run_tb_vote(const BallotConfig& config, const VoteVector& votes, Rng& rng,
                      const TbHooks& hooks) {
  require_votes(config, votes.size(), Scheme::TravellingBallot);
  RunResult result;
  result.transcript = start_transcript(config, rng);
  Transcript& tr = result.transcript;
  Rng measure = rng.split("measure");
  Rng salts = rng.split("salt");
  Rng hook_rng = rng.split("hook");

  PureState state = prepare_tb_ballot(config.d);
  tr.add(EventKind::Prepare, 0, std::nullopt, Json{{"ballot", "Omega_0"}, {"sites", 2}});
  const LocalUnitary shift = shift_unitary(config.d);
  for (std::size_t i = 0; i < config.n; ++i) {
    tr.add(EventKind::Distribute, 0, i, Json{{"qudit", "travelling"}});
    if (hooks.before_vote) hooks.before_vote(i, state, hook_rng);
    if (votes[i].is_yes()) state = apply_local(state, 1, shift.pow(votes[i].weight()));
    if (hooks.after_vote) hooks.after_vote(i, state, hook_rng);
    tr.add(EventKind::Vote, 0, i, vote_payload(votes[i], salts));
  }
  tr.add(EventKind::Return, 0, std::nullopt, Json{{"qudit", "travelling"}});
  if (hooks.on_return) hooks.on_return(state);
  result.tally = decode_tb(state, config.d, measure);
  result.repetitions = {result.tally};
  tr.add(EventKind::Measure, 0, std::nullopt, Json{{"decoder", "difference"}}, to_json(result.tally));
  finish(result);
  return result;
}

RunResult run_secure_vote(const BallotConfig& config, const VoteVector& votes, Rng& rng,
                          std::size_t repetitions, const SecureHooks& hooks) {
  require_votes(config, votes.size(), Scheme::Secure);
  if (repetitions < 1) throw ConfigError("at least one repetition is required");
  RunResult result;
  result.transcript = start_transcript(config, rng);
  Transcript& tr = result.transcript;
  const std::size_t d = config.d;
  const PureState issued_yes = voting_qudit_state(d, config.theta_yes());
  const PureState issued_no = voting_qudit_state(d, config.theta_no());
  const VectorXc uniform = VectorXc::Constant(static_cast<Eigen::Index>(d), 1.0 / std::sqrt(double(d)));

  Json p_values = Json::array();
  for (std::size_t rep = 0; rep < repetitions; ++rep) {
    Rng rep_rng = rng.split("rep", rep);
    Rng salts = rng.split("salt", rep);
    Rng hook_rng = rng.split("hook", rep);

    CorrelatedState state = CorrelatedState::from_coefficients(config.n, uniform);
    tr.add(EventKind::Prepare, rep, std::nullopt, Json{{"ballot", "Omega_0"}, {"sites", config.n}});
    for (std::size_t i = 0; i < config.n; ++i)
      tr.add(EventKind::Distribute, rep, i, Json{{"qudits", Json::array({"ballot", "voting"})}});
    std::vector<std::size_t> shifts;
    for (std::size_t i = 0; i < config.n; ++i) {
      const PureState cast = hooks.cast_state ? hooks.cast_state(i, rep, votes[i], hook_rng)
                                              : (votes[i].is_yes() ? issued_yes : issued_no);
      auto step = cast_vote_secure(state, cast, rep_rng);
      state = std::move(step.state);
      shifts.push_back(step.r);
      Json payload = vote_payload(votes[i], salts);
      payload["r"] = step.r;
      tr.add(EventKind::Vote, rep, i, std::move(payload));
    }
    for (std::size_t i = 0; i < config.n; ++i) tr.add(EventKind::Return, rep, i);
    const Tally t = decode_secure(state, config, shifts, rep_rng);
    result.repetitions.push_back(t);
    p_values.push_back(t.p ? Json(*t.p) : Json(nullptr));
    tr.add(EventKind::Measure, rep, std::nullopt, Json{{"decoder", "phase"}}, to_json(t));
  }

  bool agree = true;
  for (const Tally& t : result.repetitions)
    agree = agree && t.ok() && t == result.repetitions.front();
  result.tally = agree ? result.repetitions.front() : Tally{TallyStatus::CheatDetected, 0, std::nullopt};
  result.statistics = Json{{"repetitions", repetitions}, {"p_values", std::move(p_values)}, {"agree", agree}};
  finish(result);
  return result;
}

// ---------------------------------------------------------------------------

DiningResult classical_dining(std::size_t n, std::optional<std::size_t> payer, Rng& rng) {
  CoinTable coins(n, std::vector<int>(n, 0));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k) coins[j][k] = coins[k][j] = static_cast<int>(rng.below(2));
  return classical_dining(n, payer, coins);
}

DiningResult classical_dining(std::size_t n, std::optional<std::size_t> payer, const CoinTable& coins) {
  if (n < 3) throw ConfigError("dining cryptographers needs at least 3 participants");
  if (payer && *payer >= n) throw ConfigError("payer index out of range");
  if (coins.size() != n) throw ConfigError("coin table must be n x n");
  DiningResult out;
  for (std::size_t k = 0; k < n; ++k) {
    if (coins[k].size() != n) throw ConfigError("coin table must be n x n");
    int s = (payer && *payer == k) ? 1 : 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k) continue;
      if (coins[j][k] != coins[k][j]) throw ConfigError("coin table must be symmetric");
      s ^= coins[j][k] & 1;
    }
    out.announcements.push_back(s);
    out.parity ^= s;
  }
  out.nsa_paid = out.parity == 0;
  return out;
}

ModularVoteResult classical_modular_vote(const std::vector<int>& votes, Rng& rng) {
  const std::size_t n = votes.size();
  KeyTable keys(n, std::vector<long>(n, 0));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k) {
      keys[j][k] = static_cast<long>(rng.below(2 * n + 1)) - static_cast<long>(n);
      keys[k][j] = -keys[j][k];
    }
  return classical_modular_vote(votes, keys);
}

ModularVoteResult classical_modular_vote(const std::vector<int>& votes, const KeyTable& keys) {
  const std::size_t n = votes.size();
  if (n < 2) throw ConfigError("modular vote needs at least 2 voters");
  if (keys.size() != n) throw ConfigError("key table must be N x N");
  const long modulus = static_cast<long>(n) + 1;
  ModularVoteResult out;
  out.modulus = static_cast<std::size_t>(modulus);
  long sum = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (votes[k] != 0 && votes[k] != 1) throw ConfigError("votes must be 0 or 1");
    if (keys[k].size() != n) throw ConfigError("key table must be N x N");
    long s = votes[k];
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k) continue;
      if (keys[j][k] != -keys[k][j]) throw ConfigError("key table must be antisymmetric");
      s += keys[j][k];
    }
    s = ((s % modulus) + modulus) % modulus;
    out.announcements.push_back(s);
    sum += s;
  }
  out.total = static_cast<std::size_t>(sum % modulus);
  return out;
}

}  // namespace qvote
