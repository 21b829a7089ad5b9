#include <chrono>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "fgforge/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Order-by-order Einstein expansions of asymptotically hyperbolic "
      "metrics on the solid torus"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_path;
  std::string input_path;
  std::optional<int> grid;
  std::optional<int> order;
  std::optional<std::uint64_t> seed;
  bool degenerate = false;

  auto add_common = [&](CLI::App* sub, bool with_input) {
    sub->add_option("--spec", spec_path, "Job description file (JSON)");
    sub->add_option("--out", out_path, "Output coefficient file");
    sub->add_option("--grid", grid, "Grid points per axis (power of two)");
    sub->add_option("--order", order, "Expansion order");
    sub->add_option("--seed", seed, "Seed for deterministic sampling");
    if (with_input) {
      sub->add_option("input", input_path, "Input coefficient file");
    }
  };

  add_common(app.add_subcommand(
                 "expand", "Solve the expansion from boundary data"),
             false);
  add_common(app.add_subcommand(
                 "verify", "Recompute the integrity audits of a file"),
             true);
  add_common(app.add_subcommand(
                 "wick", "Continue a solved expansion to Lorentzian "
                         "signature"),
             true);
  CLI::App* ell = app.add_subcommand(
      "ellipticity", "Check the boundary-symbol complementing condition");
  add_common(ell, false);
  ell->add_flag("--degenerate", degenerate,
                "Run the rank-deficient comparison variant");
  add_common(app.add_subcommand(
                 "reference", "Emit a closed-form reference metric"),
             false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  fgforge::CliOverrides overrides;
  overrides.grid = grid;
  overrides.order = order;
  overrides.seed = seed;
  if (!input_path.empty()) overrides.input = input_path;
  if (!out_path.empty()) overrides.output = out_path;
  overrides.degenerate = degenerate;

  std::string command = app.get_subcommands().front()->get_name();
  auto start = std::chrono::steady_clock::now();
  int code = fgforge::run_cli(command, spec_path, overrides, std::cout,
                              std::cerr);
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  std::fprintf(stderr, "fgforge %s: exit %d after %.3f s\n", command.c_str(),
               code, secs);
  return code;
}
