#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "ioncav/runner.hpp"
#include "ioncav/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Driven three-level trapped ion in a cavity: effective-parameter "
      "extraction, exact-vs-effective evolution, parametric-regime maps, "
      "cavity squeezing, vibrational Fock-state filtering, and the "
      "quantum-vs-semiclassical comparison."};
  app.set_version_flag("--version", std::string("ioncav ") + ioncav::kVersion);
  app.require_subcommand(1);

  ioncav::CliOptions opts;
  const std::vector<std::pair<std::string, std::string>> subcommands = {
      {"params", "Validity ratios and effective coupling parameters"},
      {"evolve", "Exact vs effective dynamics with fidelity tracking"},
      {"regimes", "Parametric-branch map over the vibrational Fock index"},
      {"squeeze", "Ideal cavity squeezing (analytic or numeric engine)"},
      {"filter", "Fock-state filter via conditioned photon counting"},
      {"semiclassical", "Quantum vs semiclassical squeezing comparison"},
  };
  for (const auto& [name, description] : subcommands) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", opts.config_path,
                    "Path to the run configuration file")
        ->required();
    sub->add_option("--out", opts.out_override,
                    "Output file path (default: <experiment>.<format>)");
    sub->add_option("--format", opts.format_override,
                    "Output format: csv or json");
    sub->add_option("--sweep", opts.sweep,
                    "Fan out over one key: key=start:stop:steps");
    sub->callback([&opts, name = name] { opts.experiment = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return ioncav::run_cli(opts);
}
