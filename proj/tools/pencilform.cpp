// Command-line front end: analyze | canonize | verify | gen.

#include <iostream>

#include <CLI11.hpp>

#include "pencil/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"pencilform - canonical structure of parameter-dependent"
               " matrix pencils"};
  app.require_subcommand(1);

  pencil::CommandOptions opt;
  std::string pencil_path, transforms_path, structure_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--grid", opt.grid, "sample points per axis (default 9)");
    cmd->add_option("--shift", opt.shift, "force a constant shift c");
    cmd->add_option("--tol-rank", opt.tol_rank, "relative rank tolerance");
    cmd->add_option("--tol-canon", opt.tol_canon,
                    "relative canonization tolerance");
    cmd->add_option("--out", opt.out, "write the report/output to this path");
  };

  CLI::App* analyze = app.add_subcommand(
      "analyze", "profile a pencil against the structure hypotheses");
  analyze->add_option("pencil", pencil_path, "pencil file")->required();
  add_common(analyze);

  CLI::App* canonize = app.add_subcommand(
      "canonize", "construct the canonical form and the transforms P, Q");
  canonize->add_option("pencil", pencil_path, "pencil file")->required();
  canonize->add_option("--truth", opt.truth,
                       "ground-truth sidecar to compare structure against");
  add_common(canonize);

  CLI::App* verify = app.add_subcommand(
      "verify", "certify claimed transforms against a target");
  verify->add_option("pencil", pencil_path, "pencil file")->required();
  verify->add_option("transforms", transforms_path,
                     "transforms file (expressions) or canonize report JSON")
      ->required();
  add_common(verify);

  CLI::App* gen = app.add_subcommand(
      "gen", "generate a pencil with prescribed canonical structure");
  gen->add_option("structure", structure_path, "structure spec file")
      ->required();
  gen->add_option("--seed", opt.seed, "random seed (overrides the file)");
  gen->add_option("--grid", opt.grid, "sample points per axis");
  gen->add_option("--out", opt.out, "output pencil path");

  CLI11_PARSE(app, argc, argv);

  if (analyze->parsed())
    return pencil::run_analyze(pencil_path, opt, std::cout);
  if (canonize->parsed())
    return pencil::run_canonize(pencil_path, opt, std::cout);
  if (verify->parsed())
    return pencil::run_verify(pencil_path, transforms_path, opt, std::cout);
  if (gen->parsed()) return pencil::run_gen(structure_path, opt, std::cout);
  return 1;
}
