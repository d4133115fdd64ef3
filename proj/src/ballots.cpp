#include "qvote/ballots.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <numeric>

namespace qvote {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::complex<double> root_of_unity(std::size_t d, std::size_t power) {
  return std::polar(1.0, kTwoPi * static_cast<double>(power % d) / static_cast<double>(d));
}

std::size_t mod(long value, std::size_t d) {
  const long dd = static_cast<long>(d);
  return static_cast<std::size_t>(((value % dd) + dd) % dd);
}

void require_uniform_sites(const PureState& state, std::size_t d, std::size_t sites,
                           const char* what) {
  if (state.site_count() != sites)
    throw ConfigError(std::string(what) + ": expected " + std::to_string(sites) + " sites, got " +
                      std::to_string(state.site_count()));
  for (std::size_t s : state.dims())
    if (s != d)
      throw ConfigError(std::string(what) + ": expected all sites of dimension " +
                        std::to_string(d));
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::TravellingBallot: return "tb";
    case Scheme::DistributedBallot: return "db";
    case Scheme::Secure: return "secure";
    case Scheme::Survey: return "survey";
  }
  return "?";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "tb") return Scheme::TravellingBallot;
  if (text == "db") return Scheme::DistributedBallot;
  if (text == "secure") return Scheme::Secure;
  if (text == "survey") return Scheme::Survey;
  throw ConfigError("unknown scheme '" + std::string(text) + "' (expected tb, db, secure, survey)");
}

void BallotConfig::validate() const {
  if (d < 2) throw ConfigError("d must be >= 2");
  switch (scheme) {
    case Scheme::TravellingBallot:
      if (d < n + 1) throw ConfigError("travelling ballot requires d >= N + 1");
      break;
    case Scheme::DistributedBallot:
    case Scheme::Survey:
      if (n < 1) throw ConfigError("at least one voter is required");
      if (d <= n) throw ConfigError("distributed ballot requires d > N");
      if (scheme == Scheme::Survey && survey_max_total && *survey_max_total >= d)
        throw ConfigError("survey declared maximum total must be < d");
      break;
    case Scheme::Secure: {
      if (n < 1) throw ConfigError("at least one voter is required");
      if (d <= n) throw ConfigError("voting-qudit scheme requires d > N");
      if (!secrets) throw ConfigError("voting-qudit scheme requires secrets (l_y, l_n, delta)");
      const Secrets& s = *secrets;
      if (s.l_yes >= d || s.l_no >= d) throw ConfigError("l_y and l_n must lie in [0, d)");
      if (s.l_yes == s.l_no) throw ConfigError("l_y must differ from l_n");
      if (static_cast<std::size_t>(std::labs(s.step())) * n >= d)
        throw ConfigError("|l_y - l_n| * N must be < d");
      if (!(s.delta >= 0.0 && s.delta < kTwoPi / static_cast<double>(d)))
        throw ConfigError("delta must lie in [0, 2 pi / d)");
      break;
    }
  }
  if (scheme != Scheme::Secure && secrets)
    throw ConfigError("secrets are only meaningful for the voting-qudit scheme");
}

double BallotConfig::theta_yes() const {
  if (!secrets) throw ConfigError("no secrets configured");
  return kTwoPi * static_cast<double>(secrets->l_yes) / static_cast<double>(d) + secrets->delta;
}

double BallotConfig::theta_no() const {
  if (!secrets) throw ConfigError("no secrets configured");
  return kTwoPi * static_cast<double>(secrets->l_no) / static_cast<double>(d) + secrets->delta;
}

Secrets draw_secrets(std::size_t d, std::size_t n, Rng& rng) {
  if (n < 1 || d <= n) throw ConfigError("cannot draw secrets: need d > N >= 1");
  Secrets s;
  do {
    s.l_yes = rng.below(d);
    s.l_no = rng.below(d);
  } while (s.l_yes == s.l_no || static_cast<std::size_t>(std::labs(s.step())) * n >= d);
  s.delta = rng.uniform() * kTwoPi / static_cast<double>(d);
  return s;
}

std::string VoteChoice::to_string() const {
  if (multiplicity_) return std::to_string(weight_);
  return weight_ > 0 ? "Y" : "N";
}

VoteVector parse_votes(std::string_view text) {
  VoteVector votes;
  for (char c : text) {
    switch (std::toupper(static_cast<unsigned char>(c))) {
      case 'Y': votes.push_back(VoteChoice::yes()); break;
      case 'N': votes.push_back(VoteChoice::no()); break;
      default: throw ConfigError(std::string("invalid vote character '") + c + "'");
    }
  }
  return votes;
}

std::size_t tally(const VoteVector& votes) {
  return std::accumulate(votes.begin(), votes.end(), std::size_t{0},
                         [](std::size_t acc, const VoteChoice& v) { return acc + v.weight(); });
}

PureState tally_state(std::size_t d, std::size_t sites, std::size_t m) {
  const Dims dims(sites, d);
  VectorXc amps = VectorXc::Zero(static_cast<Eigen::Index>(total_dimension(dims)));
  std::size_t diag_step = 0;  // index of |1...1>
  for (std::size_t s = 0; s < sites; ++s) diag_step = diag_step * d + 1;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t k = 0; k < d; ++k)
    amps[static_cast<Eigen::Index>(k * diag_step)] = scale * root_of_unity(d, m * k);
  return PureState::from_amplitudes(dims, std::move(amps));
}

PureState prepare_db_ballot(std::size_t d, std::size_t n) {
  if (n < 1) throw ConfigError("distributed ballot needs at least one voter");
  if (d <= n) throw ConfigError("distributed ballot requires d > N");
  return tally_state(d, n, 0);
}

PureState prepare_tb_ballot(std::size_t d) {
  if (d < 2) throw ConfigError("d must be >= 2");
  return tally_state(d, 2, 0);
}

LocalUnitary phase_vote_unitary(std::size_t d) {
  if (d < 2) throw ConfigError("d must be >= 2");
  std::vector<double> phases(d);
  for (std::size_t k = 0; k < d; ++k)
    phases[k] = kTwoPi * static_cast<double>(k) / static_cast<double>(d);
  return LocalUnitary::diagonal_phases(phases);
}

LocalUnitary shift_unitary(std::size_t d) {
  if (d < 2) throw ConfigError("d must be >= 2");
  MatrixXc mat = MatrixXc::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < d; ++k) mat(static_cast<Eigen::Index>((k + 1) % d), static_cast<Eigen::Index>(k)) = 1.0;
  return LocalUnitary::from_matrix(std::move(mat));
}

PureState voting_qudit_state(std::size_t d, double theta) {
  if (d < 2) throw ConfigError("d must be >= 2");
  VectorXc amps(static_cast<Eigen::Index>(d));
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t k = 0; k < d; ++k)
    amps[static_cast<Eigen::Index>(k)] = std::polar(scale, static_cast<double>(k) * theta);
  return PureState::from_amplitudes({d}, std::move(amps));
}

PureState cast_vote_db(const PureState& state, std::size_t voter_site, const VoteChoice& choice,
                       std::size_t repeat) {
  if (voter_site >= state.site_count()) throw ConfigError("voter site out of range");
  const std::size_t applications = choice.weight() * repeat;
  if (applications == 0) return state;
  const std::size_t d = state.dim(voter_site);
  return apply_local(state, voter_site, phase_vote_unitary(d).pow(applications % d));
}

ProjectorSet secure_vote_projectors(std::size_t d) {
  // Basis index of |b>|v> is b * d + v.
  std::vector<MatrixXc> factors;
  factors.reserve(d);
  for (std::size_t r = 0; r < d; ++r) {
    MatrixXc q = MatrixXc::Zero(static_cast<Eigen::Index>(d * d), static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j)
      q(static_cast<Eigen::Index>(((j + r) % d) * d + j), static_cast<Eigen::Index>(j)) = 1.0;
    factors.push_back(std::move(q));
  }
  return ProjectorSet::from_isometries(d * d, std::move(factors));
}

LocalUnitary secure_correction(std::size_t d, std::size_t r) {
  return shift_unitary(d).pow(r % d);
}

SecureCast<PureState> cast_vote_secure(const PureState& state, std::size_t ballot_site,
                                       const PureState& voting_state, Rng& rng) {
  if (ballot_site >= state.site_count()) throw ConfigError("ballot site out of range");
  if (voting_state.site_count() != 1) throw ConfigError("voting state must be a single qudit");
  const std::size_t d = state.dim(ballot_site);
  if (voting_state.dim(0) != d)
    throw ConfigError("voting qudit dimension does not match the ballot qudit");

  const PureState joint = tensor(state, voting_state);
  const std::size_t voting_site = joint.site_count() - 1;
  const std::vector<std::size_t> pair{ballot_site, voting_site};
  Measurement result = measure_local(joint, std::span<const std::size_t>(pair),
                                     secure_vote_projectors(d), rng);
  // {P_r} is complete on the pair, so the complement has zero weight.
  const std::size_t r = result.outcome.value_or(0);
  return {apply_local(result.post, voting_site, secure_correction(d, r)), r, result.probability};
}

SecureCast<CorrelatedState> cast_vote_secure(const CorrelatedState& state,
                                             const PureState& voting_state, Rng& rng) {
  if (voting_state.site_count() != 1) throw ConfigError("voting state must be a single qudit");
  const std::size_t d = state.dim();
  if (voting_state.dim(0) != d)
    throw ConfigError("voting qudit dimension does not match the ballot qudit");

  // Ballot digit k pairs with voting digit k - r; after V_r the voting qudit
  // reads k again, so the coefficient of |k..k k> is a_k * phi_{k - r}.
  const auto& a = state.coefficients();
  const auto& phi = voting_state.amplitudes();
  auto shifted = [&](std::size_t r) {
    VectorXc out(static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k)
      out[static_cast<Eigen::Index>(k)] =
          a[static_cast<Eigen::Index>(k)] * phi[static_cast<Eigen::Index>((k + d - r) % d)];
    return out;
  };
  std::vector<double> probs(d);
  for (std::size_t r = 0; r < d; ++r) probs[r] = shifted(r).squaredNorm();
  std::size_t r = detail::sample_index(probs, rng.uniform());
  if (r >= d) r = d - 1;
  VectorXc coeffs = shifted(r) / std::sqrt(probs[r]);
  return {CorrelatedState(CorrelatedState::Unchecked{}, state.site_count() + 1, std::move(coeffs)),
          r, probs[r]};
}

std::string to_string(const Tally& t) {
  switch (t.status) {
    case TallyStatus::Invalid: return "INVALID";
    case TallyStatus::CheatDetected: return "CHEAT_DETECTED";
    case TallyStatus::Ok: break;
  }
  std::string out = "m=" + std::to_string(t.m);
  if (t.p) out += ", p=" + std::to_string(*t.p);
  return out;
}

ProjectorSet db_tally_projectors(std::size_t d, std::size_t sites) {
  std::vector<VectorXc> vectors;
  vectors.reserve(d);
  for (std::size_t m = 0; m < d; ++m) vectors.push_back(tally_state(d, sites, m).amplitudes());
  return ProjectorSet::from_vectors(vectors.front().size(), vectors);
}

ProjectorSet tb_difference_projectors(std::size_t d) {
  std::vector<MatrixXc> factors;
  for (std::size_t r = 0; r < d; ++r) {
    MatrixXc q = MatrixXc::Zero(static_cast<Eigen::Index>(d * d), static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k)
      q(static_cast<Eigen::Index>(k * d + (k + r) % d), static_cast<Eigen::Index>(k)) = 1.0;
    factors.push_back(std::move(q));
  }
  return ProjectorSet::from_isometries(d * d, std::move(factors));
}

ProjectorSet bell_projectors(std::size_t d) {
  std::vector<VectorXc> vectors;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t t = 0; t < d; ++t) {
    for (std::size_t s = 0; s < d; ++s) {
      VectorXc v = VectorXc::Zero(static_cast<Eigen::Index>(d * d));
      for (std::size_t k = 0; k < d; ++k)
        v[static_cast<Eigen::Index>(k * d + (k + t) % d)] = scale * root_of_unity(d, s * k);
      vectors.push_back(std::move(v));
    }
  }
  return ProjectorSet::from_vectors(d * d, vectors);
}

Tally decode_db(const PureState& state, std::size_t d, std::size_t n, Rng& rng) {
  require_uniform_sites(state, d, n, "decode_db");
  const Measurement result = measure_projective(state, db_tally_projectors(d, n), rng);
  if (!result.outcome) return {TallyStatus::Invalid, 0, std::nullopt};
  return {TallyStatus::Ok, *result.outcome, std::nullopt};
}

Tally decode_tb(const PureState& state, std::size_t d, Rng& rng) {
  require_uniform_sites(state, d, 2, "decode_tb");
  const Measurement result = measure_projective(state, tb_difference_projectors(d), rng);
  if (!result.outcome) return {TallyStatus::Invalid, 0, std::nullopt};
  return {TallyStatus::Ok, *result.outcome, std::nullopt};
}

std::optional<std::size_t> tally_from_phase(std::size_t p, long step, std::size_t d) {
  for (std::size_t m = 0; m < d; ++m)
    if (mod(static_cast<long>(m) * step, d) == p % d) return m;
  return std::nullopt;
}

namespace {

Tally phase_to_tally(std::optional<std::size_t> p, const BallotConfig& config) {
  if (!p) return {TallyStatus::Invalid, 0, std::nullopt};
  const auto m = tally_from_phase(*p, config.secrets->step(), config.d);
  if (!m) return {TallyStatus::CheatDetected, 0, p};
  return {TallyStatus::Ok, *m, p};
}

void require_secure(const BallotConfig& config) {
  if (config.scheme != Scheme::Secure)
    throw ConfigError("decode_secure requires the voting-qudit scheme");
  config.validate();
}

// e^{-i k N theta_no} removes the baseline phase; e^{-i d delta} per announced
// shift r > k removes the wraparound factor.
std::vector<double> compensation_phases(const BallotConfig& config,
                                        std::span<const std::size_t> shifts) {
  std::vector<double> phases(config.d);
  const double base = static_cast<double>(config.n) * config.theta_no();
  const double wrap = static_cast<double>(config.d) * config.secrets->delta;
  for (std::size_t k = 0; k < config.d; ++k) {
    phases[k] = -static_cast<double>(k) * base;
    for (std::size_t r : shifts)
      if (k < r % config.d) phases[k] -= wrap;
  }
  return phases;
}

}  // namespace

Tally decode_secure(const PureState& state, const BallotConfig& config,
                    std::span<const std::size_t> announced_shifts, Rng& rng) {
  require_secure(config);
  require_uniform_sites(state, config.d, 2 * config.n, "decode_secure");
  const PureState compensated = apply_local(
      state, 0, LocalUnitary::diagonal_phases(compensation_phases(config, announced_shifts)));
  const Measurement result =
      measure_projective(compensated, db_tally_projectors(config.d, 2 * config.n), rng);
  return phase_to_tally(result.outcome, config);
}

std::vector<double> secure_phase_distribution(const CorrelatedState& state,
                                              const BallotConfig& config,
                                              std::span<const std::size_t> announced_shifts) {
  require_secure(config);
  if (state.dim() != config.d || state.site_count() != 2 * config.n)
    throw ConfigError("decode_secure: expected " + std::to_string(2 * config.n) +
                      " sites of dimension " + std::to_string(config.d));
  const std::size_t d = config.d;
  const auto phases = compensation_phases(config, announced_shifts);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<double> probs(d + 1);
  double total = 0.0;
  for (std::size_t p = 0; p < d; ++p) {
    std::complex<double> overlap = 0.0;
    for (std::size_t k = 0; k < d; ++k)
      overlap += std::conj(scale * root_of_unity(d, p * k)) * std::polar(1.0, phases[k]) *
                 state.coefficients()[static_cast<Eigen::Index>(k)];
    probs[p] = std::norm(overlap);
    total += probs[p];
  }
  probs[d] = std::max(0.0, 1.0 - total);
  return probs;
}

Tally decode_secure(const CorrelatedState& state, const BallotConfig& config,
                    std::span<const std::size_t> announced_shifts, Rng& rng) {
  std::vector<double> probs = secure_phase_distribution(state, config, announced_shifts);
  probs.pop_back();
  const std::size_t pick = detail::sample_index(probs, rng.uniform());
  return phase_to_tally(pick < probs.size() ? std::optional<std::size_t>(pick) : std::nullopt,
                        config);
}

std::string_view tb_two_voter_label(std::size_t m) {
  switch (m) {
    case 0: return "refusal";
    case 1: return "undecided";
    case 2: return "acceptance";
    default: throw ConfigError("two-voter tally must be 0, 1 or 2");
  }
}

}  // namespace qvote
