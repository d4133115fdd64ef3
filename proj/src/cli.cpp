#include "qvote/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "qvote/adversary.hpp"
#include "qvote/errors.hpp"
#include "qvote/protocols.hpp"
#include "qvote/verify.hpp"

namespace qvote::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t line_at(std::string_view text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

// Field-level schema errors, tagged with the line of the field's key when the
// source text is available.
class Schema {
 public:
  explicit Schema(std::string_view text) : text_(text) {}

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    std::string prefix;
    const std::string key = path.substr(path.rfind('.') == std::string::npos ? 0 : path.rfind('.') + 1);
    if (!text_.empty()) {
      const std::size_t pos = text_.find("\"" + key + "\"");
      if (pos != std::string_view::npos) prefix = "line " + std::to_string(line_at(text_, pos)) + ": ";
    }
    throw ConfigError(prefix + "field '" + path + "': " + message);
  }

  void require_object(const Json& j, const std::string& path) const {
    if (!j.is_object()) fail(path, "must be an object");
  }

  void only_keys(const Json& j, const std::set<std::string>& allowed, const std::string& prefix) const {
    for (const auto& [key, value] : j.items())
      if (!allowed.count(key)) fail(prefix + key, "unknown field");
  }

  std::uint64_t uint(const Json& j, const std::string& key, const std::string& prefix,
                     std::optional<std::uint64_t> fallback = std::nullopt) const {
    if (!j.contains(key)) {
      if (fallback) return *fallback;
      fail(prefix + key, "required");
    }
    if (!j[key].is_number_unsigned()) fail(prefix + key, "must be a non-negative integer");
    return j[key].get<std::uint64_t>();
  }

  double number(const Json& j, const std::string& key, const std::string& prefix,
                std::optional<double> fallback = std::nullopt) const {
    if (!j.contains(key)) {
      if (fallback) return *fallback;
      fail(prefix + key, "required");
    }
    if (!j[key].is_number()) fail(prefix + key, "must be a number");
    return j[key].get<double>();
  }

  std::string string(const Json& j, const std::string& key, const std::string& prefix) const {
    if (!j.contains(key)) fail(prefix + key, "required");
    if (!j[key].is_string()) fail(prefix + key, "must be a string");
    return j[key].get<std::string>();
  }

  bool boolean(const Json& j, const std::string& key, const std::string& prefix, bool fallback) const {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean()) fail(prefix + key, "must be true or false");
    return j[key].get<bool>();
  }

  std::vector<long> int_list(const Json& j, const std::string& key, const std::string& prefix,
                             std::size_t length) const {
    if (!j.contains(key)) fail(prefix + key, "required");
    const Json& a = j[key];
    if (!a.is_array() || a.size() != length)
      fail(prefix + key, "must be an array of " + std::to_string(length) + " integers");
    std::vector<long> out;
    for (const Json& v : a) {
      if (!v.is_number_integer()) fail(prefix + key, "must contain integers");
      out.push_back(v.get<long>());
    }
    return out;
  }

 private:
  std::string_view text_;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
}

void validate_attack(const Schema& schema, const ScenarioConfig& sc, const Json& a) {
  schema.require_object(a, "attack");
  const std::string name = schema.string(a, "name", "attack.");
  const std::size_t n = sc.ballot.n;
  auto need = [&](Scheme scheme) {
    if (sc.ballot.scheme != scheme)
      schema.fail("attack.name", "'" + name + "' requires scheme '" + std::string(to_string(scheme)) + "'");
  };
  auto index = [&](const std::string& key) {
    const auto v = schema.uint(a, key, "attack.");
    if (v >= n) schema.fail("attack." + key, "voter index out of range");
  };
  if (name == "phase_estimate") {
    need(Scheme::Secure);
    schema.only_keys(a, {"name", "cheater", "scale"}, "attack.");
    index("cheater");
    if (schema.number(a, "scale", "attack.", 1.0) < 0.0) schema.fail("attack.scale", "must be >= 0");
  } else if (name == "multi_vote") {
    need(Scheme::DistributedBallot);
    schema.only_keys(a, {"name", "cheater", "extra"}, "attack.");
    index("cheater");
    schema.uint(a, "extra", "attack.");
  } else if (name == "collusion") {
    need(Scheme::TravellingBallot);
    schema.only_keys(a, {"name", "colluders"}, "attack.");
    const auto c = schema.int_list(a, "colluders", "attack.", 2);
    if (c[0] < 0 || c[0] >= c[1] || c[1] >= static_cast<long>(n))
      schema.fail("attack.colluders", "must be [i, j] with 0 <= i < j < n");
  } else if (name == "product_ballot") {
    need(Scheme::DistributedBallot);
    schema.only_keys(a, {"name", "honest_control"}, "attack.");
    schema.boolean(a, "honest_control", "attack.", false);
  } else if (name == "mismatched") {
    need(Scheme::Secure);
    schema.only_keys(a, {"name", "yes_offsets", "no_offsets"}, "attack.");
    schema.int_list(a, "yes_offsets", "attack.", n);
    if (a.contains("no_offsets")) schema.int_list(a, "no_offsets", "attack.", n);
  } else {
    schema.fail("attack.name",
                "unknown attack '" + name +
                    "' (expected phase_estimate, multi_vote, collusion, product_ballot, mismatched)");
  }
}

VoteVector votes_for(const ScenarioConfig& sc, const Rng& master, std::size_t trial) {
  if (sc.votes) return *sc.votes;
  Rng r = master.split("votes", trial);
  VoteVector v;
  for (std::size_t i = 0; i < sc.ballot.n; ++i)
    v.push_back(r.bernoulli(*sc.yes_probability) ? VoteChoice::yes() : VoteChoice::no());
  return v;
}

std::string describe(const Tally& t) {
  if (!t.ok()) return "CHEATING suspected";
  std::string s = "CLEAN, m=" + std::to_string(t.m);
  if (t.p) s += ", p=" + std::to_string(*t.p);
  return s;
}

struct Execution {
  Transcript transcript{"scenario"};
  Json result = Json::object();
  bool clean = true;
  std::string summary;
};

RunResult run_honest(const ScenarioConfig& sc, const VoteVector& votes, Rng& rng) {
  switch (sc.ballot.scheme) {
    case Scheme::DistributedBallot: return run_db_vote(sc.ballot, votes, rng);
    case Scheme::TravellingBallot: return run_tb_vote(sc.ballot, votes, rng);
    case Scheme::Secure: return run_secure_vote(sc.ballot, votes, rng, sc.repetitions);
    case Scheme::Survey: return run_survey(sc.ballot, sc.euros, rng);
  }
  throw ConfigError("unknown scheme");
}

void summarize_runs(Execution& ex, const std::vector<RunResult>& runs, const std::string& note = {}) {
  Json list = Json::array();
  std::size_t flagged = 0;
  for (const RunResult& r : runs) {
    ex.transcript.append(r.transcript);
    list.push_back(r.to_json());
    if (!r.tally.ok()) ++flagged;
  }
  ex.result["runs"] = std::move(list);
  ex.clean = flagged == 0;
  if (runs.size() == 1) ex.summary = describe(runs.front().tally);
  else if (ex.clean) ex.summary = "CLEAN, " + std::to_string(runs.size()) + "/" + std::to_string(runs.size()) + " runs";
  else
    ex.summary = "CHEATING suspected in " + std::to_string(flagged) + "/" + std::to_string(runs.size()) + " runs";
  if (!note.empty()) ex.summary += " (" + note + ")";
}

void summarize_report(Execution& ex, const AttackReport& report, const std::string& clean_note) {
  std::size_t hits = 0;
  for (bool b : report.detections) hits += b ? 1 : 0;
  ex.clean = hits == 0;
  ex.result["report"] = report.to_json();
  if (ex.clean) ex.summary = "CLEAN, " + clean_note;
  else
    ex.summary = "CHEATING suspected in " + std::to_string(hits) + "/" +
                 std::to_string(report.detections.size()) + " trials";
}

Execution execute(const ScenarioConfig& sc) {
  Execution ex;
  const Rng master(sc.seed);
  ex.result["scenario"] = sc.name;
  ex.result["seed"] = sc.seed;
  ex.result["config"] = to_json(sc.ballot);
  ex.result["secrets"] = sc.ballot.scheme == Scheme::Secure ? Json(sc.secrets_drawn ? "drawn" : "explicit")
                                                             : Json(nullptr);
  ex.result["trials"] = sc.trials;

  if (!sc.attack) {
    std::vector<RunResult> runs;
    for (std::size_t t = 0; t < sc.trials; ++t) {
      Rng trial = master.split("trial", t);
      const VoteVector votes = sc.ballot.scheme == Scheme::Survey ? VoteVector{} : votes_for(sc, master, t);
      runs.push_back(run_honest(sc, votes, trial));
    }
    summarize_runs(ex, runs);
    ex.result["verdict"] = ex.clean ? "CLEAN" : "CHEATING";
    return ex;
  }

  const Json& a = sc.attack->params;
  const std::string& name = sc.attack->name;
  ex.result["attack"] = a;
  Rng arng = master.split("attack");
  const VoteVector votes = votes_for(sc, master, 0);

  if (name == "phase_estimate") {
    const auto report = phase_estimate_attack(sc.ballot, votes, a["cheater"].get<std::size_t>(),
                                              a.value("scale", 1.0), sc.trials, arng, sc.repetitions,
                                              &ex.transcript);
    summarize_report(ex, report, "forgery undetected in " + std::to_string(sc.trials) + " trials");
  } else if (name == "multi_vote") {
    std::vector<RunResult> runs;
    for (std::size_t t = 0; t < sc.trials; ++t) {
      Rng trial = arng.split("trial", t);
      runs.push_back(multi_vote_plain(sc.ballot, votes, a["cheater"].get<std::size_t>(),
                                      a["extra"].get<std::size_t>(), trial));
    }
    summarize_runs(ex, runs, "honest tally " + std::to_string(tally(votes)));
  } else if (name == "collusion") {
    const auto c = a["colluders"].get<std::vector<std::size_t>>();
    const auto report = collusion_attack_tb(sc.ballot, votes, {c[0], c[1]}, sc.trials, arng, &ex.transcript);
    const auto inferred = report.inferred["inferred_histogram"].get<std::vector<std::size_t>>();
    const std::size_t between = report.inferred["between_yes"].get<std::size_t>();
    summarize_report(ex, report,
                     "colluders inferred " + std::to_string(between) + " in " +
                         std::to_string(inferred[between % sc.ballot.d]) + "/" + std::to_string(sc.trials) +
                         " trials");
  } else if (name == "product_ballot") {
    const auto report = authority_product_ballot(sc.ballot, votes, sc.trials, arng,
                                                 a.value("honest_control", false), &ex.transcript);
    std::ostringstream note;
    note << "identification accuracy " << report.inferred["identification_accuracy"].get<double>();
    summarize_report(ex, report, note.str());
  } else if (name == "mismatched") {
    const auto yes = a["yes_offsets"].get<std::vector<long>>();
    const auto no = a.contains("no_offsets") ? a["no_offsets"].get<std::vector<long>>()
                                             : std::vector<long>(sc.ballot.n, 0);
    std::vector<std::pair<double, double>> thetas;
    for (std::size_t i = 0; i < sc.ballot.n; ++i)
      thetas.emplace_back(sc.ballot.theta_yes() + kTwoPi * double(yes[i]) / double(sc.ballot.d),
                          sc.ballot.theta_no() + kTwoPi * double(no[i]) / double(sc.ballot.d));
    AttackReport merged;
    Json reports = Json::array();
    for (std::size_t t = 0; t < sc.trials; ++t) {
      Rng trial = arng.split("trial", t);
      const auto report = mismatched_voting_states(sc.ballot, thetas, votes, trial, sc.repetitions, 7,
                                                   &ex.transcript);
      reports.push_back(report.to_json());
      merged.detections.push_back(report.detections.front());
    }
    summarize_report(ex, merged, "symmetry test passed in " + std::to_string(sc.trials) + " trials");
    ex.result["report"] = Json{{"attack", "mismatched_voting_states"}, {"trials", std::move(reports)}};
  }
  ex.result["verdict"] = ex.clean ? "CLEAN" : "CHEATING";
  return ex;
}

// ---------------------------------------------------------------------------

PureState honest_ballot(Scheme scheme, std::size_t d, const VoteVector& votes) {
  if (scheme == Scheme::DistributedBallot) {
    PureState s = prepare_db_ballot(d, votes.size());
    for (std::size_t i = 0; i < votes.size(); ++i) s = cast_vote_db(s, i, votes[i]);
    return s;
  }
  if (d < votes.size() + 1) throw ConfigError("travelling ballot requires d >= N + 1");
  PureState s = prepare_tb_ballot(d);
  for (const VoteChoice& v : votes)
    if (v.is_yes()) s = apply_local(s, 1, shift_unitary(d));
  return s;
}

Scheme verify_scheme(const std::string& name) {
  const Scheme s = parse_scheme(name);
  if (s != Scheme::DistributedBallot && s != Scheme::TravellingBallot)
    throw ConfigError("--scheme must be db or tb");
  return s;
}

}  // namespace

Json parse_json_text(std::string_view text, std::string_view origin) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    const std::size_t offset = e.byte == 0 ? 0 : e.byte - 1;
    std::size_t column = 1;
    for (std::size_t i = offset; i > 0 && text[i - 1] != '\n'; --i) ++column;
    throw ConfigError(std::string(origin) + ": line " + std::to_string(line_at(text, offset)) +
                      ", column " + std::to_string(column) + ": invalid JSON");
  }
}

ScenarioConfig parse_scenario(const Json& j, std::string_view default_name, std::string_view text) {
  const Schema schema(text);
  if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
  schema.only_keys(j,
                   {"name", "scheme", "d", "n", "votes", "vote_distribution", "euros", "max_total",
                    "secrets", "repetitions", "trials", "seed", "attack", "output_dir"},
                   "");
  ScenarioConfig sc;
  sc.name = j.contains("name") ? schema.string(j, "name", "") : std::string(default_name);
  try {
    sc.ballot.scheme = parse_scheme(schema.string(j, "scheme", ""));
  } catch (const ConfigError& e) {
    schema.fail("scheme", e.what());
  }
  sc.ballot.d = schema.uint(j, "d", "");
  sc.ballot.n = schema.uint(j, "n", "");
  sc.seed = schema.uint(j, "seed", "");
  sc.trials = schema.uint(j, "trials", "", 1);
  if (sc.trials < 1) schema.fail("trials", "must be >= 1");
  if (j.contains("output_dir")) sc.output_dir = schema.string(j, "output_dir", "");

  const bool survey = sc.ballot.scheme == Scheme::Survey;
  const bool secure = sc.ballot.scheme == Scheme::Secure;
  const int sources = int(j.contains("votes")) + int(j.contains("vote_distribution")) + int(j.contains("euros"));
  if (sources != 1)
    schema.fail(survey ? "euros" : "votes", "exactly one of votes, vote_distribution, euros is required");
  if (survey) {
    if (!j.contains("euros")) schema.fail("euros", "the survey scheme takes euros");
    const Json& e = j["euros"];
    if (!e.is_array() || e.size() != sc.ballot.n)
      schema.fail("euros", "must be an array of n non-negative integers");
    for (const Json& v : e) {
      if (!v.is_number_unsigned()) schema.fail("euros", "must contain non-negative integers");
      sc.euros.push_back(v.get<std::size_t>());
    }
    if (j.contains("max_total")) sc.ballot.survey_max_total = schema.uint(j, "max_total", "");
  } else {
    if (j.contains("euros")) schema.fail("euros", "only the survey scheme takes euros");
    if (j.contains("max_total")) schema.fail("max_total", "only the survey scheme takes max_total");
    if (j.contains("votes")) {
      try {
        sc.votes = parse_votes(schema.string(j, "votes", ""));
      } catch (const ConfigError& e) {
        schema.fail("votes", e.what());
      }
      if (sc.votes->size() != sc.ballot.n)
        schema.fail("votes", "expected " + std::to_string(sc.ballot.n) + " votes");
    } else {
      const Json& dist = j["vote_distribution"];
      schema.require_object(dist, "vote_distribution");
      schema.only_keys(dist, {"yes_probability"}, "vote_distribution.");
      sc.yes_probability = schema.number(dist, "yes_probability", "vote_distribution.");
      if (*sc.yes_probability < 0.0 || *sc.yes_probability > 1.0)
        schema.fail("vote_distribution.yes_probability", "must lie in [0, 1]");
    }
  }

  if (secure) {
    sc.repetitions = schema.uint(j, "repetitions", "", kDefaultRepetitions);
    if (sc.repetitions < 1) schema.fail("repetitions", "must be >= 1");
    const Json secrets = j.contains("secrets") ? j["secrets"] : Json("drawn");
    if (secrets.is_string()) {
      if (secrets.get<std::string>() != "drawn") schema.fail("secrets", "must be \"drawn\" or an object");
      if (sc.ballot.n < 1 || sc.ballot.d <= sc.ballot.n)
        throw ConfigError("invalid configuration: voting-qudit scheme requires d > N >= 1");
      Rng authority = Rng(sc.seed).split("authority");
      sc.ballot.secrets = draw_secrets(sc.ballot.d, sc.ballot.n, authority);
      sc.secrets_drawn = true;
    } else {
      schema.require_object(secrets, "secrets");
      schema.only_keys(secrets, {"l_yes", "l_no", "delta"}, "secrets.");
      sc.ballot.secrets = Secrets{schema.uint(secrets, "l_yes", "secrets."),
                                  schema.uint(secrets, "l_no", "secrets."),
                                  schema.number(secrets, "delta", "secrets.")};
    }
  } else {
    if (j.contains("secrets")) schema.fail("secrets", "only the secure scheme takes secrets");
    if (j.contains("repetitions")) schema.fail("repetitions", "only the secure scheme takes repetitions");
  }

  try {
    sc.ballot.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  if (survey) {
    std::size_t total = 0;
    for (auto e : sc.euros) total += e;
    if (total >= sc.ballot.d)
      schema.fail("euros", "total " + std::to_string(total) + " must be < d = " + std::to_string(sc.ballot.d));
  }

  if (j.contains("attack")) {
    validate_attack(schema, sc, j["attack"]);
    sc.attack = AttackSpec{j["attack"]["name"].get<std::string>(), j["attack"]};
  }
  return sc;
}

void apply_override(Json& j, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ConfigError("override '" + std::string(assignment) + "' must look like key=value");
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  Json value = Json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  Json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
    if (!node->is_object()) throw ConfigError("override key '" + key + "' descends into a non-object");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    if (!node->contains(part)) (*node)[part] = Json::object();
    node = &(*node)[part];
    start = dot + 1;
  }
}

int cmd_run(const fs::path& config_path, const RunOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const std::string text = read_file(config_path);
    Json j = parse_json_text(text, config_path.string());
    for (const std::string& o : options.overrides) apply_override(j, o);
    if (options.seed && j.is_object()) j["seed"] = *options.seed;
    if (options.trials && j.is_object()) j["trials"] = *options.trials;
    const ScenarioConfig sc = parse_scenario(j, config_path.stem().string(), text);

    fs::path out_dir = sc.output_dir;
    if (const char* env = std::getenv(kOutDirEnv); env && *env) out_dir = env;
    if (options.out) out_dir = *options.out;

    const Execution ex = execute(sc);
    const fs::path transcript_path = out_dir / (sc.name + ".transcript.jsonl");
    const fs::path result_path = out_dir / (sc.name + ".result.json");
    write_file(transcript_path, ex.transcript.to_jsonl());
    write_file(result_path, ex.result.dump(2) + "\n");
    out << ex.summary << "\n";
    out << "transcript: " << transcript_path.string() << "\n";
    out << "result: " << result_path.string() << "\n";
    return ex.clean ? kExitClean : kExitFail;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitConfig;
  }
}

int cmd_verify(std::string_view target, const VerifyParams& params, std::ostream& out, std::ostream& err) {
  try {
    if (target == "privacy") {
      const PrivacyReport r = check_privacy(verify_scheme(params.scheme), params.d, params.n, params.tolerance);
      out << (r.pass ? "PASS" : "FAIL") << " privacy " << params.scheme << " d=" << params.d
          << " n=" << params.n << "\n"
          << r.to_json().dump(2) << "\n";
      return r.pass ? kExitClean : kExitFail;
    }
    if (target == "reduced") {
      const Scheme scheme = verify_scheme(params.scheme);
      const VoteVector votes =
          params.votes.empty() ? VoteVector(params.n, VoteChoice::no()) : parse_votes(params.votes);
      if (votes.size() != params.n) throw ConfigError("--votes must have n entries");
      if (params.sites.empty()) throw ConfigError("--sites is required");
      const PureState state = honest_ballot(scheme, params.d, votes);
      const ReducedCheck r = check_reduced_identity(state, params.sites, params.tolerance);
      Json sites = params.sites;
      out << (r.pass ? "PASS" : "FAIL") << " reduced " << params.scheme << " sites=" << sites.dump() << "\n"
          << Json{{"deviation", r.deviation}, {"tolerance", params.tolerance}, {"pass", r.pass}}.dump(2)
          << "\n";
      return r.pass ? kExitClean : kExitFail;
    }
    if (target == "nogo") {
      Rng rng(params.seed);
      const NogoResult r = qubit_nogo_search(params.restarts, params.iterations, rng);
      const double qutrit = qutrit_solution_check();
      const bool pass = r.above_floor && qutrit <= tol::kExact;
      Json report = r.to_json();
      report["qutrit_residual"] = qutrit;
      out << (pass ? "PASS" : "FAIL") << " nogo min_residual=" << r.min_residual << " floor=" << kQubitNogoFloor
          << " qutrit_residual=" << qutrit << "\n"
          << report.dump(2) << "\n";
      return pass ? kExitClean : kExitFail;
    }
    if (target == "ansatz") {
      if (params.d < 2) throw ConfigError("--d must be >= 2");
      std::vector<double> etas = params.etas, alphas = params.alphas;
      if (etas.empty())
        for (std::size_t j = 0; j < params.d; ++j) etas.push_back(kTwoPi * double(j) / double(params.d));
      if (alphas.empty()) alphas.assign(params.d, 1.0 / std::sqrt(double(params.d)));
      const AnsatzReport r = ansatz_check(params.d, etas, alphas, params.tolerance);
      out << (r.holds ? "PASS" : "FAIL") << " ansatz d=" << params.d << "\n" << r.to_json().dump(2) << "\n";
      return r.holds ? kExitClean : kExitFail;
    }
    throw ConfigError("unknown verify target '" + std::string(target) +
                      "' (expected privacy, reduced, nogo, ansatz)");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

int cmd_report(const fs::path& transcript_path, std::ostream& out, std::ostream& err) {
  std::string text;
  try {
    text = read_file(transcript_path);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  std::vector<Event> events;
  std::vector<std::size_t> bad_lines;
  std::istringstream lines(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(lines, line)) {
    ++number;
    if (line.empty()) {
      bad_lines.push_back(number);
      continue;
    }
    try {
      const Json j = Json::parse(line);
      events.push_back(Event::from_json(j));
    } catch (const std::exception&) {
      bad_lines.push_back(number);
    }
  }
  if (!bad_lines.empty()) {
    err << "corrupt transcript lines:";
    for (std::size_t n : bad_lines) err << " " << n;
    err << "\n";
    return kExitConfig;
  }
  if (events.empty()) {
    err << "error: empty transcript\n";
    return kExitConfig;
  }

  std::optional<Json> config;
  std::vector<std::string> order;
  std::map<std::string, std::vector<Tally>> tallies;
  std::size_t readout_runs = 0, readout_flagged = 0;
  try {
    for (const Event& e : events) {
      if (e.kind == EventKind::Config && !config && e.payload.contains("config")) config = e.payload["config"];
      if (e.kind == EventKind::Result && e.outcome.is_object() && e.outcome.value("subset_test", "") == "CHEATING")
        ++readout_flagged;
      if (e.kind != EventKind::Measure) continue;
      if (e.outcome.is_object() && e.outcome.contains("status")) {
        if (!tallies.count(e.run_id)) order.push_back(e.run_id);
        tallies[e.run_id].push_back(tally_from_json(e.outcome));
      } else {
        ++readout_runs;
      }
    }
  } catch (const std::exception& e) {
    err << "error: malformed MEASURE outcome: " << e.what() << "\n";
    return kExitConfig;
  }

  std::size_t flagged = 0, agreeing = 0;
  std::map<std::string, std::size_t> m_hist, p_hist;
  for (const std::string& id : order) {
    const auto& reps = tallies[id];
    const Verdict v = reps.size() >= 2 ? detect_inconsistent_results(reps)
                                       : (reps.front().ok() ? Verdict::Clean : Verdict::Cheating);
    if (v == Verdict::Cheating) ++flagged;
    else ++agreeing;
    for (const Tally& t : reps) {
      ++m_hist[t.ok() ? std::to_string(t.m) : (t.status == TallyStatus::Invalid ? "invalid" : "cheat_detected")];
      if (t.p) ++p_hist[std::to_string(*t.p)];
    }
  }

  out << "runs: " << order.size();
  if (!order.empty()) out << ", repetitions per run: " << tallies[order.front()].size();
  out << "\n";
  if (readout_runs)
    out << "runs with per-site readouts only: " << readout_runs << ", subset test flagged " << readout_flagged
        << "\n";
  out << "repetition agreement: " << agreeing << "/" << order.size() << "\n";
  out << "detections: " << flagged << "/" << order.size() << "\n";
  out << "tally histogram: " << Json(m_hist).dump() << "\n";
  if (!p_hist.empty()) out << "phase histogram: " << Json(p_hist).dump() << "\n";
  if (config && config->contains("n")) {
    const std::size_t n = (*config)["n"].get<std::size_t>();
    const std::string scheme = config->value("scheme", "");
    if (scheme != "survey") {
      std::ostringstream info;
      info.precision(4);
      info << "information: I_i = N log2|X| = " << n << " bits, I_f = log2|Y| = log2(" << n + 1
           << ") = " << std::log2(double(n + 1)) << " bits";
      out << info.str() << "\n";
    }
  }

  if (order.empty()) {
    if (readout_flagged > 0) {
      out << "CHEATING suspected (" << readout_flagged << "/" << readout_runs << " runs)\n";
      return kExitFail;
    }
    out << "no tally events\n";
    return kExitClean;
  }
  if (flagged > 0) {
    out << "CHEATING suspected";
    if (order.size() > 1) out << " (" << flagged << "/" << order.size() << " runs)";
    out << "\n";
    return kExitFail;
  }
  const Tally& first = tallies[order.front()].front();
  bool uniform = true;
  for (const std::string& id : order) uniform = uniform && tallies[id].front() == first;
  if (uniform) out << describe(first);
  else out << "CLEAN, " << order.size() << " runs";
  out << "\n";
  return kExitClean;
}

}  // namespace qvote::cli
