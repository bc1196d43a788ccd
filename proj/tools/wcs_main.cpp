#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "wcs/wcs.h"

int main(int argc, char** argv) {
  CLI::App app{"Weighted l1 recovery and sparse-property certification"};
  app.set_version_flag("--version", std::string(wcs_version()));
  app.require_subcommand(1, 1);

  std::string config;
  std::string out_dir;
  std::size_t workers = 0;
  std::uint64_t seed = 0;

  const char* names[][2] = {
      {"certify", "Measure RIP, NSP or robust-NSP constants of a matrix"},
      {"recover", "Solve weighted basis pursuit (denoising)"},
      {"construct", "Sample sensing matrices and build counterexamples"},
      {"experiment", "Run a built-in sweep and write CSV plus a JSON summary"},
  };
  for (const auto& n : names) {
    CLI::App* sub = app.add_subcommand(n[0], n[1]);
    sub->add_option("--config", config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--workers", workers, "Worker threads (default: available parallelism)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "RNG seed, overrides the config");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const bool has_seed = app.get_subcommands().front()->count("--seed") > 0;

  char* report = nullptr;
  char* message = nullptr;
  int exit_code = 1;
  const wcs_status st = wcs_run_command(command.c_str(), config.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(),
                                        workers, seed, has_seed ? 1 : 0, &report, &exit_code, &message);
  if (st != WCS_OK) {
    std::fprintf(stderr, "wcs %s: error %d: %s\n", command.c_str(), static_cast<int>(st), wcs_last_error());
    return 1;
  }
  std::fputs(report, stdout);
  std::fputc('\n', stdout);
  if (message) std::fprintf(stderr, "wcs %s: %s\n", command.c_str(), message);
  wcs_string_free(report);
  wcs_string_free(message);
  return exit_code;
}
