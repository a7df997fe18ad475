#include "acns/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>

#include "acns/io.hpp"

namespace acns {

using nlohmann::json;

namespace {

std::string at(const RunConfig& c, const std::string& name) { return (std::filesystem::path(c.out) / name).string(); }

std::string numbered(const char* stem, int i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04d.csv", stem, i);
  return buf;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::vector<std::uint64_t> seeds_of(const RunConfig& c) {
  std::vector<std::uint64_t> s;
  for (int i = 0; i < c.paths; ++i) s.push_back(path_seed(c.seed, static_cast<std::uint64_t>(i)));
  return s;
}

json failures_json(const EnsembleResult& e) {
  json f = json::array();
  for (const auto& x : e.failures) f.push_back({{"path", x.path}, {"t", x.t}, {"what", x.what}});
  return f;
}

json check_json(const CheckResult& r) { return {{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}}; }

void report(std::ostream& log, const CheckResult& r) {
  log << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
}

bool finite_all(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return !v.empty();
}

GalerkinState initial_of(const RunConfig& c, const GalerkinSystem& sys) {
  return sys.initial_state(c.stripe_amp, c.stripe_width, c.u_amp);
}

void write_common(const RunConfig& c, const std::string& command) {
  std::filesystem::create_directories(c.out);
  write_json(at(c, "manifest.json"), manifest(c, command, seeds_of(c)));
  write_json(at(c, "schema.json"), output_schema());
}

}  // namespace

CheckResult check_dissipation(const DissipationReport& r) {
  CheckResult c{"dissipation", false, ""};
  if (r.dt.size() < 2 || !finite_all(r.residual)) {
    c.detail = "need at least two finite residuals";
    return c;
  }
  std::size_t fine = 0;
  bool decreasing = true;
  for (std::size_t i = 0; i < r.dt.size(); ++i)
    if (r.dt[i] < r.dt[fine]) fine = i;
  for (std::size_t i = 0; i < r.dt.size(); ++i)
    for (std::size_t j = 0; j < r.dt.size(); ++j)
      if (r.dt[i] < r.dt[j] && !(r.residual[i] < r.residual[j])) decreasing = false;
  const double rel = r.residual[fine] / r.E0;
  c.pass = decreasing && r.slope >= 0.8 && rel < 1e-3;
  c.detail = "slope " + sci(r.slope) + ", residual/E0 at dt=" + sci(r.dt[fine]) + " is " + sci(rel) +
             (decreasing ? "" : ", not decreasing");
  return c;
}

CheckResult check_estimates(const std::vector<EstimateReport>& l41, const std::vector<EstimateReport>& l42) {
  CheckResult c{"a_priori_estimates", true, ""};
  int jensen = 0;
  for (const auto* v : {&l41, &l42})
    for (const auto& r : *v) {
      if (!r.finite || !std::isfinite(r.C_hat)) c.pass = false;
      jensen += r.jensen_violations;
    }
  const auto a = refinement_stability(l41), b = refinement_stability(l42);
  c.pass = c.pass && jensen == 0 && a.pass && b.pass;
  c.detail = "second-moment spread " + sci(a.spread) + ", fourth-moment spread " + sci(b.spread) +
             ", Jensen violations " + std::to_string(jensen);
  return c;
}

CheckResult check_strong_order(const StrongOrderReport& r, double min_slope) {
  CheckResult c{"strong_order", false, ""};
  c.pass = finite_all(r.error) && r.dt.size() >= 2 && r.slope >= min_slope;
  c.detail = "slope " + sci(r.slope) + " over " + std::to_string(r.paths) + " paths (need >= " + sci(min_slope) + ")";
  return c;
}

CheckResult check_perturbation(const PerturbationReport& r) {
  CheckResult c{"stability", false, ""};
  // a collapsed weight H would only measure the first steps
  c.pass = r.identical_lhs == 0.0 && finite_all(r.lhs) && std::abs(r.slope - 2.0) <= 0.2 && r.H_end >= 0.1;
  c.detail = "identical-input distance " + sci(r.identical_lhs) + ", eps slope " + sci(r.slope) + ", H(T) " +
             sci(r.H_end);
  return c;
}

CheckResult check_h1(const H1Audit& r) {
  CheckResult c{"noise_h1", false, ""};
  c.pass = r.lipschitz_violations == 0 && r.growth_violations == 0;
  c.detail = std::to_string(r.pairs) + " pairs, violations " + std::to_string(r.lipschitz_violations) + "/" +
             std::to_string(r.growth_violations) + ", max ratios " + sci(r.max_lipschitz) + "/" + sci(r.max_growth);
  return c;
}

CheckResult check_audit(const std::vector<RatioReport>& r) {
  CheckResult c{"inequality_audit", !r.empty(), ""};
  int growing = 0;
  for (const auto& x : r) {
    if (!x.finite || x.trend != "stable") ++growing;
  }
  c.pass = c.pass && growing == 0;
  c.detail = std::to_string(r.size()) + " inequalities, " + std::to_string(growing) + " flagged";
  return c;
}

Eigen::VectorXd phase_perturbation(const GalerkinSystem& sys) {
  const auto g = sys.basis().geom;
  const auto phi = sample(g, [](double x, double y) { return std::cos(x) * std::cos(std::numbers::pi * y); }, true);
  return sys.project_initial(VectorField(g, true), phi).chi;
}

int cmd_simulate(const RunConfig& c, std::ostream& log) {
  write_common(c, "simulate");
  const auto wb = make_workbench(c);
  const auto sys = make_system(c, wb, control_of(c, c.control));
  const auto ens = run_ensemble(*sys, path_settings(c), initial_of(c, *sys), c.seed, c.paths, c.threads);
  for (std::size_t k = 0; k < ens.paths.size(); ++k) {
    write_trajectory_csv(at(c, numbered("path", ens.ids[k])), ens.paths[k]);
    write_trace_csv(at(c, numbered("trace", ens.ids[k])), ens.paths[k].trace);
  }
  write_json(at(c, "failures.json"), failures_json(ens));
  log << "simulate: " << ens.paths.size() << " paths written, " << ens.failures.size() << " failed\n";
  return ens.failures.empty() ? kExitOk : kExitCheckFailed;
}

int cmd_audit(const RunConfig& c, std::ostream& log) {
  write_common(c, "audit");
  AuditSettings s;
  s.nx = c.audit_nx, s.ny = c.audit_ny, s.alpha = c.alpha, s.theta = c.potential.theta, s.decay = c.audit_decay;
  std::vector<RatioReport> reps;
  json out = json::array();
  for (auto q : all_inequalities()) {
    reps.push_back(audit(q, c.audit_samples, c.seed, s));
    out.push_back(to_json(reps.back()));
  }
  const auto wb = make_workbench(c);
  const auto h1 = audit_h1(*wb.basis, noise_model(c), 1000, c.seed);
  const auto ca = check_audit(reps), ch = check_h1(h1);
  report(log, ca);
  report(log, ch);
  write_json(at(c, "audit.json"),
             {{"inequalities", out},
              {"noise_h1",
               {{"pairs", h1.pairs},
                {"K", noise_model(c).K},
                {"max_lipschitz", h1.max_lipschitz},
                {"max_growth", h1.max_growth},
                {"lipschitz_violations", h1.lipschitz_violations},
                {"growth_violations", h1.growth_violations}}},
              {"checks", {check_json(ca), check_json(ch)}}});
  return ca.pass && ch.pass ? kExitOk : kExitCheckFailed;
}

int cmd_verify(const RunConfig& c, std::ostream& log) {
  const long steps2 = std::lround(c.T / (2 * c.dt));
  if (std::abs(steps2 * 2 * c.dt - c.T) > 1e-9 * std::max(1.0, c.T))
    throw ConfigError("time.T", "verify needs T to be a multiple of 2 dt");
  for (double d : c.verify_dts) {
    const double q = c.T / d, r = d / 6.25e-5;
    if (std::abs(q - std::round(q)) > 1e-9 * q || std::abs(r - std::round(r)) > 1e-9 * r)
      throw ConfigError("verify.dts", "each entry must divide T and be a multiple of 6.25e-5");
  }
  write_common(c, "verify");
  std::vector<CheckResult> checks;
  json out;

  // deterministic homogeneous balance
  {
    RunConfig h = c;
    h.noise.clear();
    h.noise_K = -1;
    const auto wb = make_workbench(h);
    const auto sys = make_system(h, wb, control_of(h, {}));
    const auto rep = dissipation_study(*sys, initial_of(h, *sys), h.T, h.verify_dts, path_settings(h).opt);
    out["dissipation"] = to_json(rep);
    checks.push_back(check_dissipation(rep));
  }

  // a priori estimates at (n/2, 2 dt) and (n, dt)
  {
    std::vector<EstimateReport> l41, l42;
    json lv = json::array();
    for (int level = 0; level < 2; ++level) {
      RunConfig r = c;
      if (level == 0) r.n = std::max(1, c.n / 2), r.dt = 2 * c.dt;
      const auto wb = make_workbench(r);
      const auto sys = make_system(r, wb, control_of(r, r.control));
      const auto ens = run_ensemble(*sys, path_settings(r), initial_of(r, *sys), r.seed, r.paths, r.threads);
      std::vector<EnergyTrace> tr;
      for (const auto& p : ens.paths) tr.push_back(p.trace);
      if (tr.size() < 2) throw std::runtime_error("verify: fewer than two successful paths");
      l41.push_back(estimate_check_L41(tr));
      l42.push_back(estimate_check_L42(tr));
      lv.push_back({{"n", r.n},
                    {"dt", r.dt},
                    {"second_moment", to_json(l41.back())},
                    {"fourth_moment", to_json(l42.back())},
                    {"failures", failures_json(ens)}});
    }
    out["estimates"] = lv;
    checks.push_back(check_estimates(l41, l42));
  }

  const auto wb = make_workbench(c);
  const auto sys = make_system(c, wb, control_of(c, c.control));
  const auto init = initial_of(c, *sys);

  // strong order on the configured noise
  if (sys->noise().m() > 0) {
    const auto rep = strong_order_study(*sys, init, c.T, c.verify_dts, 6.25e-5, c.seed, c.paths, path_settings(c).opt);
    out["strong_order"] = {{"dt", rep.dt}, {"error", rep.error}, {"dt_ref", rep.dt_ref}, {"slope", rep.slope}};
    checks.push_back(check_strong_order(rep));
  } else {
    log << "SKIP strong_order: no noise channels configured\n";
  }

  // weighted stability distance under common noise
  {
    const std::vector<double> eps{1e-1, 1e-2, 1e-3};
    const auto rep = perturbation_study(*sys, path_settings(c), init, phase_perturbation(*sys), eps,
                                        path_seed(c.seed, 0), c.stability_C);
    out["stability"] = {
        {"identical_lhs", rep.identical_lhs}, {"eps", rep.eps}, {"lhs", rep.lhs}, {"ratio", rep.ratio},
        {"slope", rep.slope}, {"H_end", rep.H_end}, {"C", c.stability_C}};
    checks.push_back(check_perturbation(rep));
  }

  // admissibility of the configured control
  if (!c.control.empty()) {
    const auto a = admissibility_check(control_of(c, c.control), *wb.geom, c.C0, c.delta, c.T > 0 ? c.T : c.dt, c.p);
    out["admissibility"] = to_json(a);
    checks.push_back({"admissibility", a.pass, "exp(exponent) = " + sci(a.value) + " against delta " + sci(c.delta)});
  }

  // functional inequalities and the noise hypothesis
  {
    AuditSettings s;
    s.nx = c.audit_nx, s.ny = c.audit_ny, s.alpha = c.alpha, s.theta = c.potential.theta, s.decay = c.audit_decay;
    std::vector<RatioReport> reps;
    json a = json::array();
    for (auto q : all_inequalities()) {
      reps.push_back(audit(q, c.audit_samples, c.seed, s));
      a.push_back(to_json(reps.back()));
    }
    out["inequalities"] = a;
    checks.push_back(check_audit(reps));
    const auto h1 = audit_h1(*wb.basis, sys->noise(), 1000, c.seed);
    out["noise_h1"] = {{"pairs", h1.pairs},
                       {"max_lipschitz", h1.max_lipschitz},
                       {"max_growth", h1.max_growth},
                       {"lipschitz_violations", h1.lipschitz_violations},
                       {"growth_violations", h1.growth_violations}};
    checks.push_back(check_h1(h1));
  }

  bool ok = true;
  json cj = json::array();
  for (const auto& r : checks) {
    report(log, r);
    cj.push_back(check_json(r));
    ok = ok && r.pass;
  }
  out["checks"] = cj;
  write_json(at(c, "verify.json"), out);
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_optimize(const RunConfig& c, const std::string& resume, std::ostream& log) {
  write_common(c, "optimize");
  const auto wb = make_workbench(c);
  const auto family = family_of(c);
  const auto ps = path_settings(c);
  const auto w = weights_of(c);

  struct Run {
    std::shared_ptr<const GalerkinSystem> sys;
    EnsembleResult ens;
  };
  // common random numbers: every candidate reuses the master seed
  auto run = [&](const BoundaryControl& ctrl) {
    Run r;
    r.sys = make_system(c, wb, ctrl);
    r.ens = run_ensemble(*r.sys, ps, initial_of(c, *r.sys), c.seed, c.paths, c.threads);
    return r;
  };

  Targets targets;
  if (c.targets == "zero") {
    const auto sys0 = make_system(c, wb, control_of(c, {}));
    const long N = std::lround(c.T / c.dt);
    std::vector<double> t;
    for (long k = 0; k <= N; ++k) t.push_back(k * c.dt);
    targets = zero_targets(*sys0, t);
  } else if (c.targets == "control") {
    const auto r = run(control_of(c, c.target_control));
    if (!r.ens.failures.empty()) throw std::runtime_error("optimize: target control run produced failed paths");
    targets = mean_targets(r.ens.paths);
  } else {
    targets = read_targets_csv(c.target_csv);
  }

  const Objective objective = [&](const BoundaryControl& ctrl) {
    const auto r = run(ctrl);
    if (!r.ens.failures.empty()) {
      CostReport bad;
      bad.J = std::numeric_limits<double>::infinity();
      return bad;
    }
    return cost_J(*r.sys, r.ens.paths, targets, ctrl, w);
  };

  std::optional<OptimizerRecord> previous;
  if (!resume.empty()) previous = optimizer_record_from_json(read_json(resume));
  const auto hash = config_hash(c);
  const auto checkpoint = at(c, "optimizer.json");
  const Progress progress = [&](const OptimizerRecord& rec) {
    auto j = to_json(rec);
    j["config_hash"] = hash;
    write_json(checkpoint, j);
  };

  const double bound = family_exponent_bound(family, *wb.geom);
  log << "optimize: " << family.dim() << " parameters, box exponent bound " << sci(bound) << " (exp "
      << sci(std::exp(bound)) << " vs delta " << sci(c.delta) << ")\n";
  const auto rec = optimize(family, *wb.geom, objective, c.optimizer, previous ? &*previous : nullptr, progress);
  progress(rec);

  const auto best_ctrl = synthesize_control(rec.best_params, family);
  json best = {{"best_params", rec.best_params},
               {"best_J", rec.best_J},
               {"best_se", rec.history[rec.best_index].se},
               {"best_index", rec.best_index},
               {"evaluations", rec.history.size()},
               {"admissibility", to_json(admissibility_check(best_ctrl, *wb.geom, family.C0, family.delta, family.T,
                                                             family.p, family.quad_points))},
               {"family_exponent_bound", bound}};
  if (c.targets == "control") {
    const auto ref = objective(control_of(c, c.target_control));
    best["reference_J"] = ref.J;
    best["reference_se"] = ref.ci.se;
    best["within_3se"] = rec.best_J <= ref.J + 3 * ref.ci.se;
  }
  write_json(at(c, "best.json"), best);
  log << "optimize: best J " << sci(rec.best_J) << " at evaluation " << rec.best_index << " of "
      << rec.history.size() << "\n";
  return kExitOk;
}

}  // namespace acns
