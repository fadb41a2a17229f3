#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "spectral_lab/cli.hpp"

namespace cli = spectral_lab::cli;

int main(int argc, char** argv) {
  CLI::App app{"spectral_lab: root maps, majorization and polynomial pencils"};
  app.require_subcommand(1);

  cli::RunConfig cfg;
  std::string out_path = "-";
  std::string format = "json";
  double lambda_max = 0, eps = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--tol", cfg.tol, "comparison tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_path, "report path, '-' for stdout");
  };

  std::map<CLI::App*, cli::Command> commands;
  auto add = [&](const char* name, const char* help, cli::Command c) {
    CLI::App* sub = app.add_subcommand(name, help);
    commands[sub] = c;
    common(sub);
    return sub;
  };

  auto* roots = add("roots", "certified real roots of a polynomial", cli::Command::Roots);
  roots->add_option("--poly", cfg.poly, "polynomial JSON (file, '-' or inline)")->required();

  auto* compare = add("compare", "majorization verdict between two tuples", cli::Command::Compare);
  compare->add_option("--x", cfg.x)->required();
  compare->add_option("--y", cfg.y)->required();

  auto* ds = add("ds-matrix", "doubly stochastic A with X = A Y", cli::Command::DsMatrix);
  ds->add_option("--x", cfg.x)->required();
  ds->add_option("--y", cfg.y)->required();

  auto pencil_inputs = [&](CLI::App* sub) {
    sub->add_option("--poly", cfg.poly, "P")->required();
    auto* q = sub->add_option("--q", cfg.q, "Q (default: P')");
    sub->add_option("--p2", cfg.p2, "second endpoint; Q = P - P2 normalized")->excludes(q);
  };

  auto* scan = add("pencil-scan", "hyperbolicity report and root table of {P - lambda Q}", cli::Command::PencilScan);
  pencil_inputs(scan);
  scan->add_option("--points", cfg.grid_points, "grid size")->check(CLI::Range(3, 1000000));
  auto* lmax = scan->add_option("--lambda-max", lambda_max, "grid half-width");
  scan->add_option("--conv-tol", cfg.conv_tol)->check(CLI::PositiveNumber);
  scan->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* orbit = add("orbit-check", "compare P with T(P) for T in A'", cli::Command::OrbitCheck);
  orbit->add_option("--poly", cfg.poly)->required();
  orbit->add_option("--op", cfg.op, "e.g. \"a=0.5;b=0;alphas=0.3,-0.2\"")->required();
  orbit->add_option("--seed", cfg.seed);

  auto* lmin = add("local-min", "local minimality of the shift family at lambda0", cli::Command::LocalMin);
  pencil_inputs(lmin);
  lmin->add_option("--lambda0", cfg.lambda0);
  auto* eps_opt = lmin->add_option("--eps", eps, "window half-width");
  lmin->add_option("--samples", cfg.samples, "samples per side")->check(CLI::PositiveNumber);

  auto* unit_twist = add("prop41", "z^n - 1 against its twist by a small complex lambda", cli::Command::UnitRootTwist);
  unit_twist->add_option("--n", cfg.n);
  unit_twist->add_option("--lam-mod", cfg.lam_mod);
  unit_twist->add_option("--lam-arg", cfg.lam_arg);
  unit_twist->add_option("--steps", cfg.steps);

  auto* hyp_twist = add("prop42", "hyperbolic P against its twist by r e^{i theta}", cli::Command::HyperbolicTwist);
  hyp_twist->add_option("--n", cfg.n);
  hyp_twist->add_option("--theta", cfg.theta);
  hyp_twist->add_option("--r", cfg.r);
  hyp_twist->add_option("--seed", cfg.seed);

  auto* conj = add("conjecture-scan", "random search over complex P and real-parameter T", cli::Command::ConjectureScan);
  conj->add_option("--trials", cfg.trials);
  conj->add_option("--deg-min", cfg.deg_min);
  conj->add_option("--deg-max", cfg.deg_max);
  conj->add_option("--seed", cfg.seed);
  conj->add_option("--counterexamples", cfg.counterexample_out, "write counterexample records here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  for (auto& [sub, c] : commands)
    if (sub->parsed()) cfg.command = c;
  if (lmax->count()) cfg.lambda_max = lambda_max;
  if (eps_opt->count()) cfg.eps = eps;
  cfg.format = format == "csv" ? cli::Format::Csv : cli::Format::Json;

  const auto res = cli::run(cfg, std::cin);
  if (out_path == "-") {
    std::cout << res.output;
  } else {
    std::ofstream f(out_path);
    if (!f) {
      std::cerr << "cannot write " << out_path << "\n";
      std::cout << res.output;
      return 1;
    }
    f << res.output;
  }
  return res.exit_code;
}
