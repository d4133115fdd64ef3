#pragma once

// Scenario files and the run / verify / report commands behind the qvote tool.
//
// Scenario JSON (unknown fields are rejected):
//   name            string, default: config file stem
//   scheme          "db" | "tb" | "secure" | "survey"
//   d, n            integers
//   votes           "YNYY"                      (db, tb, secure)
//   vote_distribution {"yes_probability": p}    (db, tb, secure; drawn per trial)
//   euros           [2, 0, 3]                   (survey)
//   max_total       integer                     (survey, optional)
//   secrets         "drawn" | {"l_yes", "l_no", "delta"}   (secure, default "drawn")
//   repetitions     integer >= 1                (secure, default 3)
//   trials          integer >= 1, default 1
//   seed            unsigned integer, required
//   attack          {"name": ..., params}       optional, see AttackSpec
//   output_dir      string, default "out"
//
// Exit codes: 0 clean / pass, 1 cheating detected / verification failed,
// 2 configuration or input error.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qvote/ballots.hpp"
#include "qvote/transcript.hpp"

namespace qvote::cli {

inline constexpr int kExitClean = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;

/// Environment variable that overrides the scenario's output_dir.
inline constexpr const char* kOutDirEnv = "QVOTE_OUT_DIR";

/// name is one of:
///   phase_estimate {cheater, scale = 1}           secure
///   multi_vote     {cheater, extra}               db
///   collusion      {colluders: [i, j]}            tb
///   product_ballot {honest_control = false}       db
///   mismatched     {yes_offsets: [..], no_offsets: [..] optional}   secure
struct AttackSpec {
  std::string name;
  Json params = Json::object();
};

struct ScenarioConfig {
  std::string name;
  BallotConfig ballot;  // secrets resolved
  bool secrets_drawn = false;
  std::optional<VoteVector> votes;
  std::optional<double> yes_probability;
  std::vector<std::size_t> euros;
  std::size_t repetitions = 3;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::optional<AttackSpec> attack;
  std::filesystem::path output_dir = "out";
};

/// Parses JSON text; syntax errors carry line and column.
Json parse_json_text(std::string_view text, std::string_view origin);

/// Validates against the scenario schema and resolves drawn secrets from the
/// seed. `text` is only used to attach line numbers to field errors.
ScenarioConfig parse_scenario(const Json& j, std::string_view default_name = "scenario",
                              std::string_view text = {});

/// "a.b=value": value is parsed as JSON, or taken as a string if that fails.
void apply_override(Json& j, std::string_view assignment);

struct RunOptions {
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::filesystem::path> out;
};

int cmd_run(const std::filesystem::path& config_path, const RunOptions& options, std::ostream& out,
            std::ostream& err);

struct VerifyParams {
  std::string scheme = "db";
  std::size_t d = 5;
  std::size_t n = 4;
  double tolerance = tol::kPipeline;
  std::string votes;
  std::vector<std::size_t> sites;
  std::size_t restarts = 200;
  std::size_t iterations = 500;
  std::uint64_t seed = 7;
  std::vector<double> etas;
  std::vector<double> alphas;
};

/// target: privacy | reduced | nogo | ansatz
int cmd_verify(std::string_view target, const VerifyParams& params, std::ostream& out,
               std::ostream& err);

int cmd_report(const std::filesystem::path& transcript_path, std::ostream& out, std::ostream& err);

}  // namespace qvote::cli
