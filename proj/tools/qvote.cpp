#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qvote/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = qvote::cli;
  CLI::App app{"Simulator and verification harness for entangled-qudit anonymous voting"};
  app.require_subcommand(1);

  std::string config;
  cli::RunOptions run_opts;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Execute a scenario file");
  run->add_option("config_path,--config", config, "Scenario JSON")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Master seed");
  auto* trials_opt = run->add_option("--trials", trials, "Trial count");
  auto* out_opt = run->add_option("--out", out_dir, "Output directory");
  run->add_option("--override", run_opts.overrides, "key=value, repeatable; dotted keys reach nested fields");

  std::string target;
  cli::VerifyParams vp;
  std::string sites;
  auto* verify = app.add_subcommand("verify", "Check privacy conditions or run the feasibility searches");
  verify->add_option("target", target, "privacy | reduced | nogo | ansatz")
      ->required()
      ->check(CLI::IsMember({"privacy", "reduced", "nogo", "ansatz"}));
  verify->add_option("--scheme", vp.scheme, "db or tb");
  verify->add_option("--d", vp.d, "Qudit dimension");
  verify->add_option("--n", vp.n, "Voter count");
  verify->add_option("--tolerance", vp.tolerance);
  verify->add_option("--votes", vp.votes, "e.g. YNYY (reduced)");
  verify->add_option("--sites", vp.sites, "Subset of sites (reduced)")->delimiter(',');
  verify->add_option("--restarts", vp.restarts, "(nogo)");
  verify->add_option("--iterations", vp.iterations, "(nogo)");
  verify->add_option("--seed", vp.seed, "(nogo)");
  verify->add_option("--etas", vp.etas, "(ansatz)")->delimiter(',');
  verify->add_option("--alphas", vp.alphas, "(ansatz)")->delimiter(',');

  std::string transcript;
  auto* report = app.add_subcommand("report", "Summarize a transcript");
  report->add_option("transcript", transcript, "Transcript JSONL")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitConfig;
  }

  if (*run) {
    if (*seed_opt) run_opts.seed = seed;
    if (*trials_opt) run_opts.trials = trials;
    if (*out_opt) run_opts.out = out_dir;
    return cli::cmd_run(config, run_opts, std::cout, std::cerr);
  }
  if (*verify) return cli::cmd_verify(target, vp, std::cout, std::cerr);
  return cli::cmd_report(transcript, std::cout, std::cerr);
}
