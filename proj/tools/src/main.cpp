#include <iostream>

#include <CLI11.hpp>

#include "hqkd/cli.hpp"
#include "hqkd/errors.hpp"

using hqkd::cli::CommandRequest;

int main(int argc, char** argv) {
  CLI::App app{"Two-qubit key distribution simulator"};
  app.set_version_flag("--version", hqkd::cli::version());
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "human";
  app.add_option("--format", format, "Output format: human, csv or json")
      ->check(CLI::IsMember({"human", "csv", "json"}));

  CommandRequest req;
  std::map<std::string, std::string>& p = req.params;
  std::string transcript;

  auto opt = [&](CLI::App* sub, const std::string& name, const std::string& help, bool required = false) {
    auto* o = sub->add_option_function<std::string>(
        "--" + name, [&p, name](const std::string& v) { p[name] = v; }, help);
    if (required) o->required();
    return o;
  };

  auto* run = app.add_subcommand("run", "Run the protocol for m steps");
  opt(run, "config", "JSON run configuration")->check(CLI::ExistingFile);
  opt(run, "seed", "Master seed (overrides the config)");
  run->add_option("--transcript", transcript, "Write the per-step CSV transcript here");

  auto* screen = app.add_subcommand("screen-basis", "Classify an alphabet and test it against the canonical attacks");
  opt(screen, "basis", "Basis file or built-in name (202, bell, 004, 400)", true);
  screen->add_flag_function("--strict", [&p](std::int64_t) { p["strict"] = "true"; },
                            "Exit with status 3 unless the verdict is candidate-secure");

  auto* check = app.add_subcommand("analyzer-check", "Exact and sampled click statistics of Bob's analyzer");
  opt(check, "shots", "Monte Carlo shots per letter (default 100000)");
  opt(check, "seed", "Master seed (default 42)");

  auto* eve = app.add_subcommand("eve-stats", "Exact information gain and detection probability of an attack");
  opt(eve, "basis", "Basis file or built-in name", true);
  opt(eve, "attack", "none | local-measure-q2 | ancilla-swap | intercept-resend,<q1>,<q2>", true);

  auto* sweep = app.add_subcommand("sweep", "Intercept-resend grid search");
  opt(sweep, "basis", "Basis file or built-in name", true);
  opt(sweep, "grid", "q1=<items>;q2=<items>, items none|theta|theta/phi|from:to:step", true);
  opt(sweep, "threads", "Worker threads");

  auto* curve = app.add_subcommand("detection-curve", "Cumulative detection probability 1-(1-p)^N");
  opt(curve, "p", "Per-test detection probability", true);
  opt(curve, "n-max", "Largest N", true);

  app.add_subcommand("table1", "Efficiencies of published key distribution schemes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  req.subcommand = app.get_subcommands().front()->get_name();
  req.format = hqkd::cli::parse_format(format);
  if (!transcript.empty()) req.transcript_path = transcript;

  try {
    const auto doc = hqkd::cli::execute(req);
    std::cout << hqkd::cli::render(doc, req.format);
    return doc.exit_code;
  } catch (const hqkd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
