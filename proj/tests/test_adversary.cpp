#include "doctest.h"

#include <cmath>
#include <numbers>
#include <set>

#include "qvote/adversary.hpp"
#include "test_support.hpp"

using namespace qvote;

namespace {

BallotConfig make(Scheme scheme, std::size_t d, std::size_t n, std::optional<Secrets> s = std::nullopt) {
  BallotConfig c{d, n, scheme, s, std::nullopt};
  c.validate();
  return c;
}

std::size_t sum(const std::vector<std::size_t>& v) {
  std::size_t s = 0;
  for (std::size_t x : v) s += x;
  return s;
}

}  // namespace

TEST_CASE("collusion_attack_tb") {
  Rng rng(10);
  SUBCASE("d = 5, N = 4, colluders (0, 3) see the two votes in between") {
    const auto report =
        collusion_attack_tb(make(Scheme::TravellingBallot, 5, 4), parse_votes("NYNY"), {0, 3}, 200, rng);
    CHECK(report.inferred["between_yes"].get<std::size_t>() == 1);
    CHECK(report.inferred["inferred_histogram"][1].get<std::size_t>() == 200);
    CHECK(sum(report.histogram) == 200);
    CHECK(report.detection_rate() == 0.0);
  }
  SUBCASE("adjacent colluders infer 0") {
    const auto report =
        collusion_attack_tb(make(Scheme::TravellingBallot, 5, 4), parse_votes("YYYY"), {1, 2}, 50, rng);
    CHECK(report.inferred["inferred_histogram"][0].get<std::size_t>() == 50);
  }
  SUBCASE("exact for every vote vector, d <= 8, N <= 5") {
    for (std::size_t d : {4, 6, 8})
      for (std::size_t n = 2; n <= std::min<std::size_t>(5, d - 1); ++n)
        for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
          VoteVector votes;
          for (std::size_t i = 0; i < n; ++i) votes.push_back((mask >> i) & 1 ? VoteChoice::yes() : VoteChoice::no());
          const std::pair<std::size_t, std::size_t> pair{0, n - 1};
          std::size_t between = 0;
          for (std::size_t i = 1; i + 1 < n; ++i) between += votes[i].weight();
          Rng r(d * 100 + n * 10 + mask);
          const auto report = collusion_attack_tb(make(Scheme::TravellingBallot, d, n), votes, pair, 5, r);
          CHECK(report.inferred["inferred_histogram"][between % d].get<std::size_t>() == 5);
          // The difference decoder still reads the right tally after the collapse.
          CHECK(report.details["tally_histogram"][tally(votes)].get<std::size_t>() == 5);
        }
  }
  SUBCASE("authority phase readout is uniform after the collapse") {
    const auto report =
        collusion_attack_tb(make(Scheme::TravellingBallot, 5, 4), parse_votes("YNYN"), {0, 3}, 1000, rng);
    CHECK(testing::chi_square_pvalue(testing::chi_square_uniform(report.histogram), 4) > 0.01);
  }
  CHECK_THROWS_AS(collusion_attack_tb(make(Scheme::DistributedBallot, 5, 4), parse_votes("YNYN"), {0, 3}, 1, rng),
                  ConfigError);
  CHECK_THROWS_AS(collusion_attack_tb(make(Scheme::TravellingBallot, 5, 4), parse_votes("YNYN"), {3, 0}, 1, rng),
                  ConfigError);
}

TEST_CASE("multi_vote_plain") {
  Rng rng(11);
  const BallotConfig c = make(Scheme::DistributedBallot, 5, 3);
  CHECK(multi_vote_plain(c, parse_votes("YYN"), 2, 4, rng).tally.m == 1);
  CHECK(multi_vote_plain(c, parse_votes("YYN"), 0, 0, rng).tally.m == 2);
  CHECK(multi_vote_plain(c, parse_votes("YYN"), 1, 5, rng).tally.m == 2);

  SUBCASE("depends only on (tally + extra) mod d") {
    for (std::size_t mask = 0; mask < 8; ++mask)
      for (std::size_t extra = 0; extra < 10; ++extra)
        for (std::size_t cheater = 0; cheater < 3; ++cheater) {
          VoteVector votes;
          for (std::size_t i = 0; i < 3; ++i) votes.push_back((mask >> i) & 1 ? VoteChoice::yes() : VoteChoice::no());
          const RunResult res = multi_vote_plain(c, votes, cheater, extra, rng);
          CHECK(res.tally.ok());
          CHECK(res.tally.m == (tally(votes) + extra) % 5);
        }
  }
}

TEST_CASE("phase_estimate_attack") {
  Rng rng(12);
  const BallotConfig c = make(Scheme::Secure, 11, 2, Secrets{1, 0, 0.4});

  SUBCASE("eps = 0 is never detected and shifts the tally by one") {
    const auto report = phase_estimate_attack(c, parse_votes("NN"), 0, 0.0, 100, rng);
    CHECK(report.detection_rate() == 0.0);
    CHECK(report.inferred["forged_tally"].get<std::size_t>() == 1);
    CHECK(report.inferred["undetected_tallies"][1].get<std::size_t>() == 100);
    CHECK(sum(report.histogram) == 300);
  }
  SUBCASE("scale 1 is detected near the oracle rate") {
    const auto fixture = testing::load_json(std::string(QVOTE_FIXTURES) + "/forgery_detection.json");
    const auto report = phase_estimate_attack(c, parse_votes("NN"), 0, 1.0, 2000, rng);
    CHECK(std::abs(report.detection_rate() - fixture["rate_quadrature"].get<double>()) < 0.05);
  }
  SUBCASE("single repetitions disagree with probability above 0.05 at eps = pi / d") {
    const BallotConfig c2 = make(Scheme::Secure, 11, 2, Secrets{1, 0, 0.0});
    SecureHooks hooks;
    hooks.cast_state = [&](std::size_t voter, std::size_t, const VoteChoice& v, Rng&) {
      return voting_qudit_state(11, voter == 0 ? c2.theta_yes() + std::numbers::pi / 11
                                               : (v.is_yes() ? c2.theta_yes() : c2.theta_no()));
    };
    std::size_t disagree = 0;
    const std::size_t trials = 1000;
    for (std::size_t t = 0; t < trials; ++t) {
      Rng r = rng.split("pair", t);
      const RunResult res = run_secure_vote(c2, parse_votes("NN"), r, 2, hooks);
      if (res.repetitions[0] != res.repetitions[1]) ++disagree;
    }
    CHECK(double(disagree) / trials > 0.05);
  }
  CHECK_THROWS_AS(phase_estimate_attack(make(Scheme::DistributedBallot, 5, 2), parse_votes("NN"), 0, 1.0, 1, rng),
                  ConfigError);
  CHECK_THROWS_AS(phase_estimate_attack(c, parse_votes("NN"), 2, 1.0, 1, rng), ConfigError);
}

TEST_CASE("authority_product_ballot") {
  Rng rng(13);
  SUBCASE("product ballot reveals every vote") {
    for (const char* votes : {"YNYY", "NNNN", "YYYY", "NYNN"}) {
      const auto report = authority_product_ballot(make(Scheme::DistributedBallot, 5, 4), parse_votes(votes), 20, rng);
      CHECK(report.inferred["identification_accuracy"].get<double>() == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(report.histogram[4] == 20);
      CHECK(report.detection_rate() > 0.9);
    }
  }
  SUBCASE("honest ballot gives chance-level identification and never trips the test") {
    const auto report =
        authority_product_ballot(make(Scheme::DistributedBallot, 5, 4), parse_votes("YNYY"), 50, rng, true);
    CHECK(report.inferred["identification_accuracy"].get<double>() == doctest::Approx(0.2).epsilon(1e-10));
    CHECK(report.detection_rate() == 0.0);
  }
  SUBCASE("N = 1 reveals the single vote either way") {
    const auto product = authority_product_ballot(make(Scheme::DistributedBallot, 3, 1), parse_votes("Y"), 5, rng);
    CHECK(product.inferred["identification_accuracy"].get<double>() == doctest::Approx(1.0));
    CHECK(product.detection_rate() == 0.0);
  }
}

TEST_CASE("mismatched_voting_states") {
  Rng rng(14);
  const Secrets s{1, 0, 0.25};
  const BallotConfig c = make(Scheme::Secure, 13, 3, s);
  const double two_pi = 2.0 * std::numbers::pi;

  SUBCASE("identical thetas behave like the honest run") {
    std::vector<std::pair<double, double>> thetas(3, {c.theta_yes(), c.theta_no()});
    const auto report = mismatched_voting_states(c, thetas, parse_votes("YNY"), rng);
    CHECK(report.details["result"]["m"].get<std::size_t>() == 2);
    CHECK(report.details["symmetry_verdict"] == "CLEAN");
  }
  SUBCASE("per-voter tags separate equal-weight patterns") {
    std::vector<std::pair<double, double>> thetas;
    for (std::size_t i = 0; i < 3; ++i) thetas.emplace_back(two_pi * double(s.l_yes + i) / 13 + s.delta, c.theta_no());
    std::set<std::size_t> ps;
    for (const char* votes : {"YNN", "NYN", "NNY"}) {
      Rng r = rng.split(votes);
      const auto report = mismatched_voting_states(c, thetas, parse_votes(votes), r);
      CHECK(report.inferred["p"] == report.inferred["predicted_p"]);
      ps.insert(report.inferred["p"].get<std::size_t>());
    }
    CHECK(ps == std::set<std::size_t>{1, 2, 3});
  }
  SUBCASE("symmetry test flags the mismatch") {
    std::vector<std::pair<double, double>> thetas;
    for (std::size_t i = 0; i < 3; ++i) thetas.emplace_back(two_pi * double(s.l_yes + i) / 13 + s.delta, c.theta_no());
    std::size_t flagged = 0;
    for (std::size_t t = 0; t < 100; ++t) {
      Rng r = rng.split("sym", t);
      flagged += mismatched_voting_states(c, thetas, parse_votes("YNY"), r).detections.front();
    }
    CHECK(flagged >= 95);
  }
}

TEST_CASE("detect_symmetry") {
  Rng rng(15);
  const PureState a = voting_qudit_state(5, 0.3);
  const PureState b = voting_qudit_state(5, 0.3 + 2.0 * std::numbers::pi / 5);
  CHECK(detect_symmetry({a, a, a}, rng, 100).verdict == Verdict::Clean);

  const SymmetryResult r = detect_symmetry({a, b}, rng, 7);
  CHECK(r.pass_probability == doctest::Approx(1.0 / 128).epsilon(1e-10));

  std::size_t detected = 0;
  for (int t = 0; t < 1000; ++t) detected += detect_symmetry({a, b}, rng, 7).verdict == Verdict::Cheating;
  CHECK(detected >= 980);

  // Same state reached through a different (l, delta) split.
  const PureState c = voting_qudit_state(5, 2.0 * std::numbers::pi / 5 + 0.1);
  const PureState c2 = voting_qudit_state(5, 0.0 + (2.0 * std::numbers::pi / 5 + 0.1));
  CHECK(detect_symmetry({c, c2}, rng, 50).verdict == Verdict::Clean);

  CHECK_THROWS_AS(detect_symmetry({a}, rng, 1), ConfigError);
  CHECK_THROWS_AS(detect_symmetry({a, voting_qudit_state(3, 0.0)}, rng, 1), ConfigError);
}

TEST_CASE("detect_subset_correlation") {
  Rng rng(16);
  PureState honest = prepare_db_ballot(5, 3);
  for (const auto& subset : std::vector<std::vector<std::size_t>>{{0, 1}, {1, 2}, {0, 1, 2}})
    CHECK(detect_subset_correlation(honest, subset, rng, 100).verdict == Verdict::Clean);

  const PureState product = tensor(voting_qudit_state(5, 0.0), voting_qudit_state(5, 0.0));
  const CorrelationResult r = detect_subset_correlation(product, {0, 1}, rng, 100);
  CHECK(r.verdict == Verdict::Cheating);
  CHECK(r.unequal_trials > 60);

  CHECK(detect_subset_correlation(honest, {1}, rng, 10).verdict == Verdict::Inconclusive);
  CHECK_THROWS_AS(detect_subset_correlation(honest, {0, 0}, rng, 1), ConfigError);
  CHECK_THROWS_AS(detect_subset_correlation(honest, {3}, rng, 1), ConfigError);
}

TEST_CASE("detect_inconsistent_results") {
  const Tally t3{TallyStatus::Ok, 3, std::nullopt};
  const Tally t4{TallyStatus::Ok, 4, std::nullopt};
  const Tally cheat{TallyStatus::CheatDetected, 0, std::nullopt};
  CHECK(detect_inconsistent_results({t3, t3, t3}) == Verdict::Clean);
  CHECK(detect_inconsistent_results({t3, t4, t3}) == Verdict::Cheating);
  CHECK(detect_inconsistent_results({t3, cheat, t3}) == Verdict::Cheating);
  CHECK_THROWS_AS(detect_inconsistent_results({t3}), ConfigError);
}

TEST_CASE("AttackReport JSON") {
  Rng rng(17);
  const auto report =
      collusion_attack_tb(make(Scheme::TravellingBallot, 5, 4), parse_votes("NYNY"), {0, 3}, 3, rng);
  const Json j = report.to_json();
  CHECK(j["attack"] == report.attack);
  CHECK(j["trials"] == 3);
  CHECK(j["detections"] == 0);
  CHECK(j["histogram"].size() == 5);
}
