// klab: batch driver for the verification suites and k-sweeps.

#include "commands.hpp"

#include "CLI11.hpp"

#include <omp.h>

#include <filesystem>
#include <iostream>

namespace {

constexpr const char* kFooter = R"(Outputs (under --out):
  report.json              schema 1; checks, per-k results, config echo
  timing.csv               task, seconds
  trajectory_k<K>.csv      iteration, op_norm, frobenius          (balance)
  gram_k<K>.csv            row, col, re, im                       (balance)
  endomorphism_b.csv       k, point, row, col, re, im             (expansion)
  a1_compare.csv           point, source, row, col, re, im        (expansion)
  rho_constancy.csv        k, rho_min, rho_max, rel_spread        (expansion)
  lambda_z.csv             k, lambda, lambda_inv, kernel_dim, moment_norm

Exit codes: 0 success, 1 check failure, 2 numerical guard, 3 config error.)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"klab: balanced metrics and Bergman expansions on projective bundles"};
  app.footer(kFooter);
  app.require_subcommand(1);

  std::string config_path, out;
  int workers = -1;
  long long seed = -1;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config (INI)")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides run.out)");
    sub->add_option("--workers", workers, "OpenMP threads, 0 = default")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "random seed (overrides run.seed)")->check(CLI::NonNegativeNumber);
  };
  struct Entry {
    const char* name;
    const char* help;
    klab::RunReport (*run)(const klab::cli::Invocation&);
  };
  const Entry entries[] = {
      {"verify", "C_r, Psi identities, rho cross-route, push-forward round trip, A_{1,1} check",
       klab::cli::run_verify},
      {"balance", "balance each k, then R-bounded and almost-balanced diagnostics", klab::cli::run_balance},
      {"expansion", "fit the Bergman endomorphism expansion and compare A_1", klab::cli::run_expansion},
      {"moment-spectrum", "Lambda_z at balanced states across k", klab::cli::run_moment_spectrum},
  };
  for (const Entry& e : entries) common(app.add_subcommand(e.name, e.help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  klab::cli::Invocation inv;
  try {
    inv.config_path = config_path;
    inv.cfg = config_path.empty() ? klab::parse_config("") : klab::load_config(config_path);
    if (!out.empty()) inv.cfg.out = out;
    if (workers >= 0) inv.cfg.workers = workers;
    if (seed >= 0) inv.cfg.seed = static_cast<std::uint64_t>(seed);
  } catch (const klab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  }
  if (inv.cfg.workers > 0) omp_set_num_threads(inv.cfg.workers);

  for (const Entry& e : entries) {
    if (!app.got_subcommand(e.name)) continue;
    inv.command = e.name;
    try {
      std::filesystem::create_directories(inv.cfg.out);
      const klab::RunReport rep = e.run(inv);
      rep.write(inv.cfg.out);
      for (const auto& c : rep.checks())
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  " << c.detail << "\n";
      std::cout << "report: " << (std::filesystem::path(inv.cfg.out) / "report.json").string() << "\n";
      return rep.all_passed() ? 0 : 1;
    } catch (const klab::ConfigError& ex) {
      std::cerr << "config error: " << ex.what() << "\n";
      return 3;
    } catch (const klab::NumericalGuardError& ex) {
      std::cerr << "numerical guard: " << ex.what() << "\nrerun: " << klab::cli::repro(inv) << "\n";
      return 2;
    } catch (const klab::InvalidPotentialError& ex) {
      std::cerr << "numerical guard: " << ex.what() << "\nrerun: " << klab::cli::repro(inv) << "\n";
      return 2;
    } catch (const klab::PreconditionError& ex) {
      std::cerr << "check failure: " << ex.what() << "\nrerun: " << klab::cli::repro(inv) << "\n";
      return 1;
    }
  }
  return 3;
}
