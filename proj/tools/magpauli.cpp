#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "magpauli/cli.hpp"

using namespace magpauli;

int main(int argc, char** argv) {
  CLI::App app{"Algebro-geometric magnetic Pauli operators: fields, zero modes, flux"};
  app.footer(cli::exit_code_table() + "\nMAGPAULI_THREADS is used when --threads is not given.");
  app.require_subcommand(1);

  std::string config, out_dir = ".", suite = "all";
  bool lenient = false;
  std::optional<int> threads;

  auto* run = app.add_subcommand("run", "run a config file");
  run->add_option("config", config, "config file (JSON)")->required();
  run->add_flag("--lenient", lenient, "warn on unknown keys instead of failing");
  run->add_option("--out-dir", out_dir, "directory for CSV output");
  run->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "run the built-in invariant suite");
  verify->add_option("--suite", suite, "all, genus0, genus1 or flux")
      ->check(CLI::IsMember({"all", "genus0", "genus1", "flux"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitUsage;
  }

  if (*verify) {
    try {
      const auto lines = cli::verify_suite(suite);
      std::cout << cli::format_report(lines);
      for (const auto& l : lines)
        if (!l.pass) return cli::kExitChecksFailed;
      return 0;
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return cli::exit_code(e.code());
    }
  }

  cli::RunConfig cfg;
  try {
    cfg = cli::load_config(config, lenient);
  } catch (const Error& e) {
    std::cerr << config << ": " << e.what() << '\n';
    return cli::exit_code(e.code());
  }
  cli::RunOptions opt;
  opt.out_dir = out_dir;
  opt.threads = cli::resolve_threads(threads);
  const auto res = cli::run(cfg, opt);
  std::cout << "mode " << cli::to_string(cfg.mode) << '\n' << res.report;
  for (const auto& p : res.written) std::cout << "wrote " << p << '\n';
  return res.exit_code;
}
