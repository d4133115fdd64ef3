#include "qvote/adversary.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include "qvote/errors.hpp"

namespace qvote {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// {|psi(2 pi l / d)>, l = 0..d-1}
ProjectorSet fourier_projectors(std::size_t d) {
  std::vector<VectorXc> vectors;
  for (std::size_t l = 0; l < d; ++l)
    vectors.push_back(voting_qudit_state(d, kTwoPi * double(l) / double(d)).amplitudes());
  return ProjectorSet::from_vectors(d, vectors);
}

// (I + SWAP) / 2 on two sites of dimension d.
ProjectorSet symmetric_projector(std::size_t d) {
  const auto dd = static_cast<Eigen::Index>(d * d);
  MatrixXc p = MatrixXc::Identity(dd, dd) * 0.5;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      p(static_cast<Eigen::Index>(a * d + b), static_cast<Eigen::Index>(b * d + a)) += 0.5;
  return ProjectorSet::from_matrices(d * d, {p});
}

void require_scheme(const BallotConfig& config, Scheme scheme, const char* what) {
  if (config.scheme != scheme)
    throw ConfigError(std::string(what) + " requires the '" + std::string(to_string(scheme)) +
                      "' scheme");
  config.validate();
}

std::size_t lattice_index(double angle, std::size_t d) {
  const double units = angle * double(d) / kTwoPi;
  const long rounded = std::lround(units);
  const long dd = static_cast<long>(d);
  return static_cast<std::size_t>(((rounded % dd) + dd) % dd);
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Clean: return "CLEAN";
    case Verdict::Cheating: return "CHEATING";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

double AttackReport::detection_rate() const {
  if (detections.empty()) return 0.0;
  std::size_t hits = 0;
  for (bool b : detections) hits += b ? 1 : 0;
  return double(hits) / double(detections.size());
}

Json AttackReport::to_json() const {
  std::size_t hits = 0;
  for (bool b : detections) hits += b ? 1 : 0;
  return Json{{"attack", attack},
              {"trials", trials},
              {"seed", seed},
              {"inferred", inferred},
              {"histogram", histogram},
              {"detections", hits},
              {"detection_rate", detection_rate()},
              {"details", details}};
}

AttackReport collusion_attack_tb(const BallotConfig& config, const VoteVector& votes,
                                 std::pair<std::size_t, std::size_t> colluders, std::size_t trials,
                                 Rng& rng, Transcript* transcript) {
  require_scheme(config, Scheme::TravellingBallot, "collusion attack");
  const auto [first, second] = colluders;
  if (!(first < second)) throw ConfigError("colluders must satisfy i < j");
  if (second >= config.n) throw ConfigError("colluder index out of range");
  const std::size_t d = config.d;

  std::size_t between = 0;
  for (std::size_t k = first + 1; k < second; ++k) between += votes.at(k).weight();

  AttackReport report;
  report.attack = "collusion_tb";
  report.trials = trials;
  report.seed = rng.seed();
  report.histogram.assign(d, 0);
  std::vector<std::size_t> inferred_hist(d, 0), tally_hist(d, 0);
  const ProjectorSet bell = bell_projectors(d);
  const std::vector<std::size_t> both{0, 1};

  for (std::size_t t = 0; t < trials; ++t) {
    Rng trial = rng.split("trial", t);
    std::size_t k_first = 0, k_second = 0;
    std::optional<PureState> returned;
    TbHooks hooks;
    hooks.after_vote = [&](std::size_t voter, PureState& s, Rng& r) {
      if (voter != first) return;
      auto m = measure_computational(s, 1, r);
      k_first = m.digit;
      s = std::move(m.post);
    };
    hooks.before_vote = [&](std::size_t voter, PureState& s, Rng& r) {
      if (voter != second) return;
      auto m = measure_computational(s, 1, r);
      k_second = m.digit;
      s = std::move(m.post);
    };
    hooks.on_return = [&](const PureState& s) { returned = s; };
    const RunResult run = run_tb_vote(config, votes, trial, hooks);
    if (transcript) transcript->append(run.transcript);

    const std::size_t inferred = (k_second + d - k_first) % d;
    ++inferred_hist[inferred];
    ++tally_hist[run.tally.m % d];
    Rng phase_rng = trial.split("phase");
    const auto bell_outcome = measure_local(*returned, std::span<const std::size_t>(both), bell, phase_rng);
    ++report.histogram[*bell_outcome.outcome % d];
    report.detections.push_back(false);
  }
  report.inferred = Json{{"between_yes", between}, {"inferred_histogram", inferred_hist}};
  report.details = Json{{"colluders", {first, second}},
                        {"tally_histogram", tally_hist},
                        {"phase_decoder", "bell index s"}};
  return report;
}

RunResult multi_vote_plain(const BallotConfig& config, const VoteVector& votes, std::size_t cheater,
                           std::size_t extra, Rng& rng) {
  require_scheme(config, Scheme::DistributedBallot, "multi-vote attack");
  if (cheater >= config.n) throw ConfigError("cheater index out of range");
  const LocalUnitary boost = phase_vote_unitary(config.d).pow(extra % config.d);
  DbHooks hooks;
  hooks.after_vote = [&](std::size_t voter, PureState& s, Rng&) {
    if (voter == cheater) s = apply_local(s, voter, boost);
  };
  return run_db_vote(config, votes, rng, hooks);
}

AttackReport phase_estimate_attack(const BallotConfig& config, const VoteVector& votes,
                                   std::size_t cheater, double error_scale, std::size_t trials,
                                   Rng& rng, std::size_t repetitions, Transcript* transcript) {
  require_scheme(config, Scheme::Secure, "phase-estimation attack");
  if (cheater >= config.n) throw ConfigError("cheater index out of range");
  if (!(error_scale >= 0.0)) throw ConfigError("error scale must be non-negative");
  const std::size_t d = config.d;
  const double half_width = std::numbers::pi * error_scale / double(d);
  const PureState issued_yes = voting_qudit_state(d, config.theta_yes());
  const PureState issued_no = voting_qudit_state(d, config.theta_no());

  AttackReport report;
  report.attack = "phase_estimate";
  report.trials = trials;
  report.seed = rng.seed();
  report.histogram.assign(d, 0);
  std::vector<std::size_t> undetected_tallies(d, 0);

  SecureHooks hooks;
  hooks.cast_state = [&](std::size_t voter, std::size_t, const VoteChoice& choice, Rng& r) {
    if (voter != cheater) return choice.is_yes() ? issued_yes : issued_no;
    const double eps = half_width > 0.0 ? r.uniform(-half_width, half_width) : 0.0;
    return voting_qudit_state(d, config.theta_yes() + eps);
  };
  for (std::size_t t = 0; t < trials; ++t) {
    Rng trial = rng.split("trial", t);
    const RunResult run = run_secure_vote(config, votes, trial, repetitions, hooks);
    if (transcript) transcript->append(run.transcript);
    for (const Tally& rep : run.repetitions)
      if (rep.p) ++report.histogram[*rep.p];
    const bool detected = run.tally.status == TallyStatus::CheatDetected;
    report.detections.push_back(detected);
    if (!detected) ++undetected_tallies[run.tally.m % d];
  }
  VoteVector forged = votes;
  forged[cheater] = VoteChoice::yes();
  report.inferred = Json{{"honest_tally", tally(votes)},
                         {"forged_tally", tally(forged)},
                         {"undetected_tallies", undetected_tallies}};
  report.details = Json{{"cheater", cheater},
                        {"error_scale", error_scale},
                        {"half_width", half_width},
                        {"repetitions", repetitions},
                        {"config", to_json(config)}};
  return report;
}

double identification_accuracy(const PureState& returned, const VoteVector& votes) {
  if (votes.size() != returned.site_count()) throw ConfigError("one vote per site expected");
  if (votes.empty()) return 1.0;
  double total = 0.0;
  for (std::size_t i = 0; i < votes.size(); ++i) {
    const std::size_t d = returned.dim(i);
    const std::vector<std::size_t> site{i};
    const DensityMatrix rho = reduced_density(returned, std::span<const std::size_t>(site));
    const VectorXc target =
        voting_qudit_state(d, kTwoPi * double(votes[i].weight() % d) / double(d)).amplitudes();
    total += std::real(target.dot(rho.matrix() * target));
  }
  return total / double(votes.size());
}

AttackReport authority_product_ballot(const BallotConfig& config, const VoteVector& votes,
                                      std::size_t trials, Rng& rng, bool honest_control,
                                      Transcript* transcript) {
  require_scheme(config, Scheme::DistributedBallot, "product-ballot attack");
  if (votes.size() != config.n) throw ConfigError("vote count does not match N");
  const std::size_t d = config.d;

  PureState ballot = prepare_db_ballot(d, config.n);
  if (!honest_control) {
    ballot = voting_qudit_state(d, 0.0);
    for (std::size_t i = 1; i < config.n; ++i) ballot = tensor(ballot, voting_qudit_state(d, 0.0));
  }
  PureState returned = ballot;
  for (std::size_t i = 0; i < config.n; ++i) returned = cast_vote_db(returned, i, votes[i]);

  AttackReport report;
  report.attack = honest_control ? "product_ballot_control" : "product_ballot";
  report.trials = trials;
  report.seed = rng.seed();
  report.histogram.assign(config.n + 1, 0);  // voters identified per trial
  const ProjectorSet fourier = fourier_projectors(d);
  std::vector<std::size_t> all_sites(config.n);
  std::iota(all_sites.begin(), all_sites.end(), std::size_t{0});
  const char* ballot_name = honest_control ? "Omega_0" : "product";
  std::size_t correct = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng trial = rng.split("trial", t);
    Rng salts = rng.split("salt", t);
    Transcript tr(run_id(trial.seed()));
    if (transcript) {
      tr.add(EventKind::Config, std::nullopt, std::nullopt,
             Json{{"config", to_json(config)}, {"seed", trial.seed()}});
      tr.add(EventKind::Prepare, 0, std::nullopt, Json{{"ballot", ballot_name}, {"sites", config.n}});
      for (std::size_t i = 0; i < config.n; ++i) tr.add(EventKind::Distribute, 0, i);
      for (std::size_t i = 0; i < config.n; ++i)
        tr.add(EventKind::Vote, 0, i,
               Json{{"commitment", commitment(votes[i].to_string(), salts.next_u64())}});
      for (std::size_t i = 0; i < config.n; ++i) tr.add(EventKind::Return, 0, i);
    }
    PureState s = returned;
    std::size_t identified = 0;
    Json readouts = Json::array();
    for (std::size_t i = 0; i < config.n; ++i) {
      const std::vector<std::size_t> site{i};
      auto m = measure_local(s, std::span<const std::size_t>(site), fourier, trial);
      if (m.outcome && *m.outcome == votes[i].weight() % d) ++identified;
      readouts.push_back(m.outcome ? Json(*m.outcome) : Json(nullptr));
      s = std::move(m.post);
    }
    correct += identified;
    ++report.histogram[identified];
    Rng check = trial.split("sacrifice");
    const bool flagged =
        config.n >= 2 && detect_subset_correlation(ballot, all_sites, check, 1).verdict == Verdict::Cheating;
    report.detections.push_back(flagged);
    if (transcript) {
      tr.add(EventKind::Measure, 0, std::nullopt, Json{{"decoder", "fourier per site"}},
             Json{{"readouts", std::move(readouts)}});
      tr.add(EventKind::Result, std::nullopt, std::nullopt, Json::object(),
             Json{{"identified", identified}, {"subset_test", flagged ? "CHEATING" : "CLEAN"}});
      transcript->append(tr);
    }
  }
  const double exact = identification_accuracy(returned, votes);
  report.inferred = Json{{"identification_accuracy", exact}};
  report.details = Json{{"identification_accuracy", exact},
                        {"empirical_accuracy",
                         trials ? double(correct) / double(trials * config.n) : 0.0},
                        {"ballot", honest_control ? "entangled" : "product"}};
  return report;
}

AttackReport mismatched_voting_states(const BallotConfig& config,
                                      const std::vector<std::pair<double, double>>& per_voter_thetas,
                                      const VoteVector& votes, Rng& rng, std::size_t repetitions,
                                      std::size_t symmetry_comparisons, Transcript* transcript) {
  require_scheme(config, Scheme::Secure, "mismatched voting states");
  if (per_voter_thetas.size() != config.n) throw ConfigError("one (theta_yes, theta_no) pair per voter");
  const std::size_t d = config.d;

  SecureHooks hooks;
  hooks.cast_state = [&](std::size_t voter, std::size_t, const VoteChoice& choice, Rng&) {
    const auto& [ty, tn] = per_voter_thetas[voter];
    return voting_qudit_state(d, choice.is_yes() ? ty : tn);
  };
  Rng run_rng = rng.split("run");
  const RunResult run = run_secure_vote(config, votes, run_rng, repetitions, hooks);
  if (transcript) transcript->append(run.transcript);

  Json yes_tags = Json::array(), no_tags = Json::array();
  std::size_t predicted = 0;
  for (std::size_t i = 0; i < config.n; ++i) {
    const std::size_t ty = lattice_index(per_voter_thetas[i].first - config.theta_no(), d);
    const std::size_t tn = lattice_index(per_voter_thetas[i].second - config.theta_no(), d);
    yes_tags.push_back(ty);
    no_tags.push_back(tn);
    predicted = (predicted + (votes[i].is_yes() ? ty : tn)) % d;
  }

  std::vector<PureState> pooled;
  for (const auto& [ty, tn] : per_voter_thetas) pooled.push_back(voting_qudit_state(d, ty));
  Rng sym_rng = rng.split("symmetry");
  const SymmetryResult sym = pooled.size() >= 2
                                 ? detect_symmetry(pooled, sym_rng, symmetry_comparisons)
                                 : SymmetryResult{Verdict::Inconclusive, 0, 0, 1.0};

  AttackReport report;
  report.attack = "mismatched_voting_states";
  report.trials = 1;
  report.seed = rng.seed();
  report.histogram.assign(d, 0);
  for (const Tally& t : run.repetitions)
    if (t.p) ++report.histogram[*t.p];
  report.detections.push_back(sym.verdict == Verdict::Cheating);
  report.inferred = Json{{"p", run.repetitions.front().p ? Json(*run.repetitions.front().p) : Json(nullptr)},
                         {"predicted_p", predicted},
                         {"yes_tags", yes_tags},
                         {"no_tags", no_tags}};
  report.details = Json{{"result", to_json(run.tally)},
                        {"symmetry_verdict", to_string(sym.verdict)},
                        {"symmetry_comparisons", sym.comparisons},
                        {"symmetry_failures", sym.failures},
                        {"symmetry_pass_probability", sym.pass_probability}};
  return report;
}

SymmetryResult detect_symmetry(const std::vector<PureState>& states, Rng& rng,
                               std::size_t comparisons) {
  if (states.size() < 2) throw ConfigError("symmetry test needs at least two states");
  const Dims& dims = states.front().dims();
  if (dims.size() != 1) throw ConfigError("symmetry test compares single-qudit states");
  for (const PureState& s : states)
    if (s.dims() != dims) throw ConfigError("symmetry test: mismatched dimensions");
  const std::size_t d = dims.front();
  const ProjectorSet sym = symmetric_projector(d);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < states.size(); ++a)
    for (std::size_t b = a + 1; b < states.size(); ++b) pairs.emplace_back(a, b);

  SymmetryResult out;
  out.comparisons = comparisons;
  for (std::size_t c = 0; c < comparisons; ++c) {
    const auto [a, b] = pairs[c % pairs.size()];
    const PureState joint = tensor(states[a], states[b]);
    out.pass_probability *= outcome_probabilities(joint, sym)[0];
    if (!measure_projective(joint, sym, rng).outcome) ++out.failures;
  }
  out.verdict = out.failures > 0 ? Verdict::Cheating : Verdict::Clean;
  return out;
}

CorrelationResult detect_subset_correlation(const PureState& ballot,
                                            const std::vector<std::size_t>& subset, Rng& rng,
                                            std::size_t trials) {
  std::set<std::size_t> seen;
  for (std::size_t s : subset) {
    if (s >= ballot.site_count()) throw ConfigError("subset site out of range");
    if (!seen.insert(s).second) throw ConfigError("duplicate site in subset");
  }
  CorrelationResult out;
  out.trials = trials;
  if (subset.size() < 2) {
    out.verdict = Verdict::Inconclusive;
    return out;
  }
  for (std::size_t t = 0; t < trials; ++t) {
    PureState copy = ballot;
    std::optional<std::size_t> first;
    bool unequal = false;
    for (std::size_t s : subset) {
      auto m = measure_computational(copy, s, rng);
      if (!first) first = m.digit;
      else if (m.digit != *first) unequal = true;
      copy = std::move(m.post);
    }
    if (unequal) ++out.unequal_trials;
  }
  out.verdict = out.unequal_trials > 0 ? Verdict::Cheating : Verdict::Clean;
  return out;
}

Verdict detect_inconsistent_results(const std::vector<Tally>& outcomes) {
  if (outcomes.size() < 2) throw ConfigError("consistency check needs at least two outcomes");
  for (const Tally& t : outcomes)
    if (!t.ok() || t.m != outcomes.front().m) return Verdict::Cheating;
  return Verdict::Clean;
}

}  // namespace qvote
