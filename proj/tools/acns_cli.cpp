// acns: batch driver for simulate / verify / optimize / audit.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acns/commands.hpp"
#include "acns/io.hpp"

namespace {

struct Overrides {
  std::string config, out, resume;
  std::uint64_t seed = 0;
  int paths = 0;
  std::vector<CLI::Option*> seed_opts, path_opts;
  bool given(const std::vector<CLI::Option*>& v) const {
    for (auto* x : v)
      if (x->count()) return true;
    return false;
  }
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "configuration file (JSON)");
  sub->add_option("--out", o.out, "output directory, created if missing");
  o.seed_opts.push_back(sub->add_option("--seed", o.seed, "master seed"));
  o.path_opts.push_back(sub->add_option("--paths", o.paths, "ensemble size")->check(CLI::PositiveNumber));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic Allen-Cahn / Navier-Stokes workbench with Navier-slip boundary control"};
  app.set_version_flag("--version", std::string(acns::kVersion));
  app.require_subcommand(1);
  Overrides o;
  auto* sim = app.add_subcommand("simulate", "run an ensemble and write per-path CSVs");
  auto* ver = app.add_subcommand("verify", "run the estimate, stability and inequality checks");
  auto* opt = app.add_subcommand("optimize", "search the control box for a minimizer of J");
  auto* aud = app.add_subcommand("audit", "audit the functional inequalities and the noise bounds");
  for (auto* s : {sim, ver, opt, aud}) add_common(s, o);
  opt->add_option("--resume", o.resume, "optimizer checkpoint to continue from")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : acns::kExitConfigError;
  }

  try {
    acns::RunConfig cfg = o.config.empty() ? acns::RunConfig{} : acns::load_config(o.config);
    if (!o.out.empty()) cfg.out = o.out;
    if (o.given(o.seed_opts)) cfg.seed = o.seed;
    if (o.given(o.path_opts)) cfg.paths = o.paths;
    cfg.validate();
    if (*sim) return acns::cmd_simulate(cfg, std::cout);
    if (*ver) return acns::cmd_verify(cfg, std::cout);
    if (*opt) return acns::cmd_optimize(cfg, o.resume, std::cout);
    return acns::cmd_audit(cfg, std::cout);
  } catch (const acns::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return acns::kExitConfigError;
  } catch (const acns::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return acns::kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return acns::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return acns::kExitCheckFailed;
  }
}
