#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zfprob/error.hpp"
#include "zfprob/experiments.hpp"

namespace {

void add_common(CLI::App* sub, zfprob::ExperimentConfig& cfg) {
  sub->add_option("--out", cfg.out_path, "Write the report to this file instead of stdout");
  sub->add_option("--format", cfg.out_format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--parallel", cfg.parallel, "Worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  zfprob::ExperimentConfig cfg;
  CLI::App app{"Zero-forcing success probability under lattice reduction"};
  app.require_subcommand(1);

  auto* reproduce = app.add_subcommand("reproduce", "Recompute the reference instances");
  reproduce->add_option("--delta", cfg.delta, "LLL parameter");
  add_common(reproduce, cfg);

  auto* reduce = app.add_subcommand("reduce", "LLL, SQRD and V-BLAST of a matrix");
  reduce->add_option("--matrix", cfg.matrix_path, "CSV model matrix")->required();
  reduce->add_option("--delta", cfg.delta, "LLL parameter");
  add_common(reduce, cfg);

  auto* decode = app.add_subcommand("decode", "ZF, SIC and exhaustive decoding");
  decode->add_option("--matrix", cfg.matrix_path, "CSV model matrix")->required();
  decode->add_option("--y", cfg.y_path, "CSV observation vector")->required();
  decode->add_option("--sigma", cfg.sigma, "Noise standard deviation");
  decode->add_option("--delta", cfg.delta, "LLL parameter");
  add_common(decode, cfg);

  auto* pzf = app.add_subcommand("pzf", "ZF success probability of a matrix");
  pzf->add_option("--matrix", cfg.matrix_path, "CSV model matrix")->required();
  pzf->add_option("--sigma", cfg.sigma, "Noise standard deviation")->required();
  pzf->add_option("--method", cfg.method, "diagonal, quad, mc or empirical");
  pzf->add_option("--trials", cfg.trials, "Samples for mc and empirical");
  pzf->add_option("--seed", cfg.seed, "RNG seed");
  add_common(pzf, cfg);

  auto* sweep = app.add_subcommand("sweep-delta", "P_ZF of LLL output across delta (n = 2)");
  sweep->add_option("--matrix", cfg.matrix_path, "CSV model matrix; random if omitted");
  sweep->add_option("--delta-grid", cfg.delta_grid, "Comma separated increasing values")
      ->delimiter(',');
  sweep->add_option("--sigma", cfg.sigma, "Noise standard deviation");
  sweep->add_option("--trials", cfg.trials, "Random instances");
  sweep->add_option("--seed", cfg.seed, "RNG seed");
  add_common(sweep, cfg);

  auto* invariance = app.add_subcommand("invariance", "Permutation reductions leave ZF unchanged");
  invariance->add_option("--trials", cfg.trials, "Random instances");
  invariance->add_option("--n", cfg.n, "Columns");
  invariance->add_option("--m", cfg.m, "Rows");
  invariance->add_option("--sigma", cfg.sigma, "Noise standard deviation");
  invariance->add_option("--seed", cfg.seed, "RNG seed");
  add_common(invariance, cfg);

  auto* ensemble = app.add_subcommand("ensemble", "Effect of LLL on P_ZF over random matrices");
  ensemble->add_option("--trials", cfg.trials, "Instances per sigma");
  ensemble->add_option("--n", cfg.n, "Columns");
  ensemble->add_option("--m", cfg.m, "Rows");
  ensemble->add_option("--sigma", cfg.sigma, "Noise standard deviation");
  ensemble->add_option("--delta", cfg.delta, "LLL parameter");
  ensemble->add_option("--seed", cfg.seed, "RNG seed");
  add_common(ensemble, cfg);

  CLI11_PARSE(app, argc, argv);
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    const zfprob::ExperimentReport report = zfprob::run_command(cfg);
    zfprob::write_report(report);
    if (const auto* failure = report.first_failure()) {
      std::cerr << "verdict failed: " << failure->name;
      if (!failure->detail.empty()) std::cerr << " (" << failure->detail << ")";
      std::cerr << '\n';
      return 1;
    }
    return 0;
  } catch (const zfprob::Error& e) {
    std::cerr << "error [" << zfprob::to_string(e.code()) << "]: " << e.what() << '\n';
    return 2;
  }
}
