// Acceptance checks, one PASS/FAIL line per criterion.
//   acceptance            run every criterion
//   acceptance 3 8        run the listed criteria
// Exit status is 0 iff every selected criterion passes.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "qvote/adversary.hpp"
#include "qvote/cli.hpp"
#include "qvote/protocols.hpp"
#include "qvote/verify.hpp"
#include "../test_support.hpp"

using namespace qvote;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << x;
  return s.str();
}

VoteVector from_mask(std::size_t n, std::size_t mask) {
  VoteVector v;
  for (std::size_t i = 0; i < n; ++i) v.push_back((mask >> i) & 1 ? VoteChoice::yes() : VoteChoice::no());
  return v;
}

BallotConfig make(Scheme scheme, std::size_t d, std::size_t n, std::optional<Secrets> s = std::nullopt) {
  BallotConfig c{d, n, scheme, s, std::nullopt};
  c.validate();
  return c;
}

const std::vector<std::pair<std::size_t, std::size_t>>& sweep() {
  static const std::vector<std::pair<std::size_t, std::size_t>> pairs = [] {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t d : {3, 5, 8})
      for (std::size_t n : {2, 3, 4})
        if (d > n) out.emplace_back(d, n);
    return out;
  }();
  return pairs;
}

// All strict, non-empty subsets of {0, .., n - 1}.
std::vector<std::vector<std::size_t>> strict_subsets(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if ((mask >> i) & 1) s.push_back(i);
    out.push_back(std::move(s));
  }
  return out;
}

Outcome criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::size_t vectors = 0;
  for (const auto& [d, n] : sweep()) {
    const ProjectorSet proj = db_tally_projectors(d, n);
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      const VoteVector votes = from_mask(n, mask);
      PureState s = prepare_db_ballot(d, n);
      for (std::size_t i = 0; i < n; ++i) s = cast_vote_db(s, i, votes[i]);
      worst = std::max(worst, 1.0 - outcome_probabilities(s, proj)[tally(votes)]);
      Rng rng(mask * 131 + d * 7 + n);
      if (decode_db(s, d, n, rng).m != tally(votes)) worst = 1.0;
      ++vectors;
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst <= 1e-10 && seconds < 30.0, std::to_string(vectors) + " vote vectors, max |1 - P(m = weight)| = " +
                                                fmt(worst) + ", " + fmt(seconds, 3) + " s"};
}

Outcome criterion_2() {
  double same = 0.0, cross = 0.0;
  bool pass = true;
  for (const auto& [d, n] : sweep()) {
    const PrivacyReport r = check_privacy(Scheme::DistributedBallot, d, n, 1e-10);
    same = std::max(same, r.worst_same_deviation);
    cross = std::max(cross, r.worst_cross_overlap);
    pass = pass && r.pass;
  }
  return {pass, "worst same-tally deviation " + fmt(same) + ", worst cross-tally overlap " + fmt(cross)};
}

Outcome criterion_3() {
  constexpr std::size_t d = 5, n = 4;
  double single = 0.0, multi = 0.0, tb = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    const VoteVector votes = from_mask(n, mask);
    PureState s = prepare_db_ballot(d, n);
    for (std::size_t stage = 0; stage <= n; ++stage) {
      if (stage > 0) s = cast_vote_db(s, stage - 1, votes[stage - 1]);
      for (const auto& subset : strict_subsets(n)) {
        const double dev = check_reduced_identity(s, subset, 1e-10).deviation;
        (subset.size() == 1 ? single : multi) = std::max(subset.size() == 1 ? single : multi, dev);
      }
    }
    PureState t = prepare_tb_ballot(d);
    const LocalUnitary shift = shift_unitary(d);
    for (std::size_t stage = 0; stage <= n; ++stage) {
      if (stage > 0 && votes[stage - 1].is_yes()) t = apply_local(t, 1, shift);
      for (std::size_t site : {0, 1}) tb = std::max(tb, check_reduced_identity(t, {site}, 1e-10).deviation);
    }
  }
  const bool pass = std::max({single, multi, tb}) <= 1e-10;
  return {pass, "DB single sites " + fmt(single) + ", DB multi-site subsets " + fmt(multi) +
                    " (expected 1/d - 1/d^|S|, classical correlation of the ballot), TB sites " + fmt(tb)};
}

Outcome criterion_4() {
  const std::vector<std::pair<std::string, std::string>> expected = {
      {"NN", "refusal"}, {"YN", "undecided"}, {"NY", "undecided"}, {"YY", "acceptance"}};
  bool pass = true;
  std::string seen;
  for (const auto& [votes, label] : expected) {
    PureState s = prepare_tb_ballot(3);
    for (const VoteChoice& v : parse_votes(votes))
      if (v.is_yes()) s = apply_local(s, 1, shift_unitary(3));
    const auto probs = outcome_probabilities(s, tb_difference_projectors(3));
    const std::size_t m = tally(parse_votes(votes));
    pass = pass && std::abs(probs[m] - 1.0) <= 1e-12;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Rng rng(seed);
      pass = pass && tb_two_voter_label(run_tb_vote(make(Scheme::TravellingBallot, 3, 2), parse_votes(votes), rng)
                                            .tally.m) == label;
    }
    seen += (seen.empty() ? "" : ", ") + votes + " -> " + std::string(label);
  }
  return {pass, seen + " (50 seeds each)"};
}

Outcome criterion_5() {
  Rng gen(5);
  std::size_t exact = 0, false_flags = 0;
  constexpr std::size_t configs = 100;
  for (std::size_t t = 0; t < configs; ++t) {
    const std::size_t d = std::vector<std::size_t>{7, 11, 13}[gen.below(3)];
    const std::size_t n = 1 + gen.below(4);
    const BallotConfig c = make(Scheme::Secure, d, n, draw_secrets(d, n, gen));
    const VoteVector votes = from_mask(n, gen.below(std::size_t{1} << n));
    Rng r = gen.split("run", t);
    const RunResult res = run_secure_vote(c, votes, r);
    const std::size_t m = tally(votes);
    const long step = c.secrets->step();
    const std::size_t p = static_cast<std::size_t>(((static_cast<long>(m) * step) % long(d) + long(d)) % long(d));
    bool ok = res.tally.ok() && res.tally.m == m;
    for (const Tally& rep : res.repetitions) ok = ok && rep.ok() && rep.p == p && rep.m == m;
    exact += ok;
    for (const Tally& rep : res.repetitions) false_flags += rep.status == TallyStatus::CheatDetected;
  }
  return {exact == configs && false_flags == 0,
          std::to_string(exact) + "/" + std::to_string(configs) + " exact, " + std::to_string(false_flags) +
              " false CHEAT_DETECTED"};
}

Outcome criterion_6() {
  Rng rng(6);
  const auto report =
      collusion_attack_tb(make(Scheme::TravellingBallot, 5, 4), parse_votes("NYNY"), {0, 3}, 1000, rng);
  const std::size_t between = report.inferred["between_yes"].get<std::size_t>();
  const std::size_t hits = report.inferred["inferred_histogram"][between].get<std::size_t>();
  const double p = testing::chi_square_pvalue(testing::chi_square_uniform(report.histogram), 4);
  return {hits == 1000 && p > 0.01, "inferred " + std::to_string(between) + " in " + std::to_string(hits) +
                                        "/1000 trials, phase-decoder chi-square p = " + fmt(p)};
}

Outcome criterion_7() {
  const BallotConfig c = make(Scheme::DistributedBallot, 5, 3);
  std::size_t checked = 0, correct = 0;
  for (std::size_t mask = 0; mask < 8; ++mask)
    for (std::size_t extra = 0; extra <= 9; ++extra)
      for (std::size_t cheater = 0; cheater < 3; ++cheater) {
        Rng rng(mask * 100 + extra * 10 + cheater);
        const VoteVector votes = from_mask(3, mask);
        const RunResult res = multi_vote_plain(c, votes, cheater, extra, rng);
        const auto probs = [&] {
          PureState s = prepare_db_ballot(5, 3);
          for (std::size_t i = 0; i < 3; ++i) s = cast_vote_db(s, i, votes[i]);
          s = cast_vote_db(s, cheater, VoteChoice::count(extra));
          return outcome_probabilities(s, db_tally_projectors(5, 3));
        }();
        const std::size_t want = (tally(votes) + extra) % 5;
        correct += res.tally.ok() && res.tally.m == want && std::abs(probs[want] - 1.0) <= 1e-10;
        ++checked;
      }
  return {correct == checked, std::to_string(correct) + "/" + std::to_string(checked) + " (votes, extra, cheater) cases"};
}

Outcome criterion_8() {
  const auto fixture = testing::load_json(std::string(QVOTE_FIXTURES) + "/forgery_detection.json");
  const double oracle = fixture["rate_quadrature"].get<double>();
  const double tolerance = fixture["tolerance"].get<double>();
  constexpr std::size_t trials = 10000;
  const VoteVector votes = parse_votes("NN");

  // Same master seed for both secret choices: trial t uses the same stream.
  Rng rng_a(8), rng_b(8);
  const auto step1 = phase_estimate_attack(make(Scheme::Secure, 11, 2, Secrets{1, 0, 0.2}), votes, 0, 1.0, trials, rng_a);
  const auto step3 = phase_estimate_attack(make(Scheme::Secure, 11, 2, Secrets{3, 0, 0.2}), votes, 0, 1.0, trials, rng_b);
  const double r1 = step1.detection_rate(), r3 = step3.detection_rate();
  const bool rate_ok = std::abs(r1 - oracle) <= tolerance;
  const bool order_ok = r1 >= r3;
  return {rate_ok && order_ok, "rate " + fmt(r1) + " vs oracle " + fmt(oracle) + " (+-" + fmt(tolerance) +
                                   "); step 1 " + fmt(r1) + " vs step 3 " + fmt(r3) +
                                   " under paired seeds (equal in expectation for prime d)"};
}

Outcome criterion_9() {
  const auto fixture = testing::load_json(std::string(QVOTE_FIXTURES) + "/nogo_floor.json");
  const double eps0 = fixture["epsilon0"].get<double>();
  const auto start = std::chrono::steady_clock::now();
  Rng rng(7);
  const NogoResult r = qubit_nogo_search(200, 500, rng);
  const double qutrit = qutrit_solution_check();
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {eps0 > 0.0 && r.min_residual >= eps0 && qutrit <= 1e-12 && seconds < 60.0,
          "qubit minimum " + fmt(r.min_residual, 10) + " >= eps0 " + fmt(eps0, 10) + ", qutrit residual " +
              fmt(qutrit) + ", " + fmt(seconds, 3) + " s"};
}

Outcome criterion_10() {
  std::size_t dining_cases = 0, dining_ok = 0;
  for (int coins = 0; coins < 8; ++coins) {
    CoinTable t(3, std::vector<int>(3, 0));
    t[0][1] = t[1][0] = coins & 1;
    t[0][2] = t[2][0] = (coins >> 1) & 1;
    t[1][2] = t[2][1] = (coins >> 2) & 1;
    for (int payer = -1; payer < 3; ++payer) {
      const auto who = payer < 0 ? std::nullopt : std::optional<std::size_t>(payer);
      dining_ok += classical_dining(3, who, t).nsa_paid == (payer < 0);
      ++dining_cases;
    }
  }
  Rng rng(10);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t pick = rng.below(8);
    const auto who = pick == 7 ? std::nullopt : std::optional<std::size_t>(pick);
    dining_ok += classical_dining(7, who, rng).nsa_paid == !who;
    ++dining_cases;
  }
  std::size_t vote_cases = 0, vote_ok = 0;
  for (std::size_t mask = 0; mask < 16; ++mask)
    for (int k = 0; k < 50; ++k) {
      std::vector<int> votes(4);
      for (std::size_t i = 0; i < 4; ++i) votes[i] = (mask >> i) & 1;
      vote_ok += classical_modular_vote(votes, rng).total == static_cast<std::size_t>(std::popcount(mask));
      ++vote_cases;
    }
  return {dining_ok == dining_cases && vote_ok == vote_cases,
          "dining " + std::to_string(dining_ok) + "/" + std::to_string(dining_cases) + ", modular vote " +
              std::to_string(vote_ok) + "/" + std::to_string(vote_cases)};
}

Outcome criterion_11() {
  Rng rng(11);
  double worst_accuracy = 1.0;
  for (std::size_t mask = 0; mask < 16; ++mask) {
    const auto report = authority_product_ballot(make(Scheme::DistributedBallot, 5, 4), from_mask(4, mask), 1, rng);
    worst_accuracy = std::min(worst_accuracy, report.inferred["identification_accuracy"].get<double>());
  }
  // Each verdict reads 100 fresh copies of the two-site subset.
  const PureState product = tensor(voting_qudit_state(5, 0.0), voting_qudit_state(5, 0.0));
  const PureState honest = prepare_db_ballot(5, 2);
  std::size_t product_flags = 0, honest_flags = 0;
  for (std::size_t t = 0; t < 500; ++t) {
    Rng a = rng.split("product", t), b = rng.split("honest", t);
    product_flags += detect_subset_correlation(product, {0, 1}, a, 100).verdict == Verdict::Cheating;
    honest_flags += detect_subset_correlation(honest, {0, 1}, b, 100).verdict == Verdict::Cheating;
  }
  const PureState psi_a = voting_qudit_state(5, 0.4);
  const PureState psi_b = voting_qudit_state(5, 0.4 + 2.0 * std::numbers::pi / 5);
  const double overlap = std::norm(inner(psi_a, psi_b));
  const SymmetryResult exact = detect_symmetry({psi_a, psi_b}, rng, 7);
  const double analytic = 1.0 - std::pow((1.0 + overlap) / 2.0, 7);
  std::size_t detected = 0;
  for (std::size_t t = 0; t < 2000; ++t) {
    Rng r = rng.split("symmetry", t);
    detected += detect_symmetry({psi_a, psi_b}, r, 7).verdict == Verdict::Cheating;
  }
  const double empirical = double(detected) / 2000.0;
  const double detect_probability = 1.0 - exact.pass_probability;
  const bool pass = std::abs(worst_accuracy - 1.0) <= 1e-10 && product_flags >= 499 && honest_flags == 0 &&
                    detect_probability >= 0.99 && std::abs(detect_probability - analytic) <= 1e-12 &&
                    std::abs(empirical - detect_probability) <= 0.01;
  return {pass, "identification accuracy " + fmt(worst_accuracy, 12) + "; subset test flags product " +
                    std::to_string(product_flags) + "/500, honest " + std::to_string(honest_flags) +
                    "/500; symmetry detection " + fmt(detect_probability) + " exact, " + fmt(empirical) +
                    " empirical (7 comparisons)"};
}

Outcome criterion_12() {
  const fs::path scenarios = fs::path(QVOTE_FIXTURES) / "scenarios";
  const fs::path base = fs::temp_directory_path() / "qvote_acceptance_12";
  std::size_t checked = 0, identical = 0;
  for (const auto& entry : fs::directory_iterator(scenarios)) {
    const std::string name = entry.path().stem().string();
    if (name.starts_with("invalid_")) continue;
    std::string files[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path dir = base / (name + (k ? "_b" : "_a"));
      fs::remove_all(dir);
      cli::RunOptions opts;
      opts.out = dir;
      std::ostringstream out, err;
      cli::cmd_run(entry.path(), opts, out, err);
      std::ifstream in(dir / (name + ".transcript.jsonl"), std::ios::binary);
      std::ostringstream s;
      s << in.rdbuf();
      files[k] = s.str();
    }
    ++checked;
    identical += !files[0].empty() && files[0] == files[1];
  }
  fs::remove_all(base);
  return {checked > 0 && identical == checked,
          std::to_string(identical) + "/" + std::to_string(checked) + " fixture transcripts byte-identical"};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria = {
    {"DB correctness", criterion_1},
    {"privacy conditions", criterion_2},
    {"intermediate privacy", criterion_3},
    {"TB qutrit mapping", criterion_4},
    {"SECURE decoding", criterion_5},
    {"collusion attack", criterion_6},
    {"multi-vote modulo behaviour", criterion_7},
    {"forgery detection", criterion_8},
    {"qubit no-go and qutrit solution", criterion_9},
    {"classical baselines", criterion_10},
    {"malicious authority", criterion_11},
    {"determinism", criterion_12},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::size_t> selected;
  for (int i = 1; i < argc; ++i) {
    const long k = std::strtol(argv[i], nullptr, 10);
    if (k < 1 || k > static_cast<long>(kCriteria.size())) {
      std::cerr << "unknown criterion '" << argv[i] << "'\n";
      return 2;
    }
    selected.push_back(static_cast<std::size_t>(k));
  }
  if (selected.empty()) {
    selected.resize(kCriteria.size());
    std::iota(selected.begin(), selected.end(), std::size_t{1});
  }
  bool all = true;
  for (std::size_t k : selected) {
    const auto& [title, check] = kCriteria[k - 1];
    Outcome v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    all = all && v.pass;
    std::cout << "criterion " << k << " [" << title << "]: " << (v.pass ? "PASS" : "FAIL") << ": " << v.detail
              << std::endl;
  }
  return all ? 0 : 1;
}
