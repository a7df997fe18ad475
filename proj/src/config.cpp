#include "acns/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace acns {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& field, const std::string& msg) {
  if (!ok) throw ConfigError(field, msg);
}

// reads obj[key] into out when present, with the dotted path in diagnostics
template <class T>
void get(const json& obj, const std::string& path, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path + "." + key, std::string("wrong type (") + e.what() + ")");
  }
}

void known_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    require(ok.count(it.key()) > 0, path + "." + it.key(), "unknown key");
}

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  return j.contains(key) ? j.at(key) : empty;
}

}  // namespace

void RunConfig::validate() const {
  require(nx >= 4 && nx % 2 == 0, "geometry.nx", "must be even and at least 4");
  require(ny >= 4, "geometry.ny", "must be at least 4");
  require(alpha > 0, "geometry.alpha", "must be positive");
  require(n >= 1, "galerkin.n", "must be at least 1");
  require(T >= 0 && std::isfinite(T), "time.T", "must be finite and non-negative");
  require(dt > 0, "time.dt", "must be positive");
  require(std::abs(std::round(T / dt) * dt - T) <= 1e-9 * std::max(1.0, T), "time.T", "must be a multiple of dt");
  require(implicitness >= 0.5 && implicitness <= 1.0, "time.implicitness", "must lie in [0.5, 1]");
  require(paths >= 1, "ensemble.paths", "must be at least 1");
  require(threads >= 1, "ensemble.threads", "must be at least 1");
  require(p > 2, "control.p", "must exceed 2");
  try {
    potential.validate();
  } catch (const std::exception& e) {
    throw ConfigError("potential", e.what());
  }
  for (std::size_t i = 0; i < noise.size(); ++i) {
    const auto f = "noise.channels[" + std::to_string(i) + "]";
    require(std::isfinite(noise[i].sigma) && std::isfinite(noise[i].h_amp), f, "non-finite amplitude");
    require(noise[i].cutoff >= 0 && noise[i].h_mode >= 0, f, "negative mode index");
  }
  try {
    noise_model(*this);
  } catch (const std::exception& e) {
    throw ConfigError("noise.K", e.what());
  }
  require(stripe_width > 0, "initial.stripe_width", "must be positive");
  require(kc >= 1, "control.kc", "must be at least 1");
  require(!knots.empty(), "control.knots", "need at least one knot");
  for (std::size_t i = 1; i < knots.size(); ++i) require(knots[i] > knots[i - 1], "control.knots", "must increase");
  const std::size_t P = knots.size() * ControlLayout{kc}.per_knot();
  require(control.empty() || control.size() == P, "control.coeffs",
          "expected " + std::to_string(P) + " values (knots x per-knot layout)");
  require(box_bound >= 0, "family.bound", "must be non-negative");
  require(C0 > 0, "family.C0", "must be positive");
  require(stability_C > 0, "verify.stability_C", "must be positive");
  require(delta > 1, "family.delta", "must exceed 1");
  require(targets == "zero" || targets == "control" || targets == "csv", "cost.targets",
          "must be zero, control or csv");
  require(targets != "control" || target_control.size() == P, "cost.target_control",
          "expected " + std::to_string(P) + " values");
  require(targets != "csv" || !target_csv.empty(), "cost.target_csv", "need at least one file");
  require(lambda1 >= 0 && lambda2 >= 0, "cost.lambda", "weights must be non-negative");
  require(tracking == "graded" || tracking == "l2", "cost.tracking", "must be graded or l2");
  require(optimizer.budget >= 1, "optimizer.budget", "must be at least 1");
  require(optimizer.lhs_seeds >= 1, "optimizer.lhs_seeds", "must be at least 1");
  require(optimizer.step0 > 0 && optimizer.step0 <= 1, "optimizer.step0", "must lie in (0, 1]");
  require(optimizer.min_step > 0, "optimizer.min_step", "must be positive");
  for (double d : verify_dts) require(d > 0, "verify.dts", "entries must be positive");
  require(audit_samples >= 1, "audit.samples", "must be at least 1");
  require(audit_nx >= 4 && audit_nx % 2 == 0 && audit_ny >= 4, "audit.nx", "audit grid must be valid");
  require(!out.empty(), "out", "must not be empty");
}

json to_json(const RunConfig& c) {
  json ch = json::array();
  for (const auto& k : c.noise)
    ch.push_back({{"sigma", k.sigma}, {"cutoff", k.cutoff}, {"h_mode", k.h_mode}, {"h_amp", k.h_amp}});
  return {
      {"geometry", {{"nx", c.nx}, {"ny", c.ny}, {"alpha", c.alpha}}},
      {"galerkin", {{"n", c.n}}},
      {"time", {{"T", c.T}, {"dt", c.dt}, {"implicitness", c.implicitness}}},
      {"ensemble", {{"paths", c.paths}, {"seed", c.seed}, {"threads", c.threads}}},
      {"potential",
       {{"theta", c.potential.theta}, {"delta", c.potential.delta}, {"xi", c.potential.xi}, {"cf", c.potential.cf}}},
      {"noise", {{"K", c.noise_K}, {"channels", ch}}},
      {"initial", {{"stripe_amp", c.stripe_amp}, {"stripe_width", c.stripe_width}, {"u_amp", c.u_amp}}},
      {"control", {{"kc", c.kc}, {"knots", c.knots}, {"coeffs", c.control}, {"p", c.p}}},
      {"family", {{"bound", c.box_bound}, {"C0", c.C0}, {"delta", c.delta}}},
      {"cost",
       {{"lambda1", c.lambda1},
        {"lambda2", c.lambda2},
        {"tracking", c.tracking},
        {"targets", c.targets},
        {"target_control", c.target_control},
        {"target_csv", c.target_csv}}},
      {"optimizer",
       {{"budget", c.optimizer.budget},
        {"lhs_seeds", c.optimizer.lhs_seeds},
        {"step0", c.optimizer.step0},
        {"min_step", c.optimizer.min_step},
        {"seed", c.optimizer.seed}}},
      {"verify", {{"dts", c.verify_dts}, {"stability_C", c.stability_C}}},
      {"audit", {{"samples", c.audit_samples}, {"decay", c.audit_decay}, {"nx", c.audit_nx}, {"ny", c.audit_ny}}},
      {"out", c.out},
  };
}

RunConfig config_from_json(const json& j) {
  known_keys(j, "config",
             {"geometry", "galerkin", "time", "ensemble", "potential", "noise", "initial", "control", "family", "cost",
              "optimizer", "verify", "audit", "out"});
  RunConfig c;
  const auto& g = section(j, "geometry");
  known_keys(g, "geometry", {"nx", "ny", "alpha"});
  get(g, "geometry", "nx", c.nx), get(g, "geometry", "ny", c.ny), get(g, "geometry", "alpha", c.alpha);
  const auto& gal = section(j, "galerkin");
  known_keys(gal, "galerkin", {"n"});
  get(gal, "galerkin", "n", c.n);
  const auto& t = section(j, "time");
  known_keys(t, "time", {"T", "dt", "implicitness"});
  get(t, "time", "T", c.T), get(t, "time", "dt", c.dt), get(t, "time", "implicitness", c.implicitness);
  const auto& e = section(j, "ensemble");
  known_keys(e, "ensemble", {"paths", "seed", "threads"});
  get(e, "ensemble", "paths", c.paths), get(e, "ensemble", "seed", c.seed), get(e, "ensemble", "threads", c.threads);
  const auto& p = section(j, "potential");
  known_keys(p, "potential", {"theta", "delta", "xi", "cf"});
  get(p, "potential", "theta", c.potential.theta), get(p, "potential", "delta", c.potential.delta);
  get(p, "potential", "xi", c.potential.xi), get(p, "potential", "cf", c.potential.cf);
  const auto& nz = section(j, "noise");
  known_keys(nz, "noise", {"K", "channels"});
  get(nz, "noise", "K", c.noise_K);
  if (nz.contains("channels")) {
    require(nz.at("channels").is_array(), "noise.channels", "expected an array");
    int i = 0;
    for (const auto& ch : nz.at("channels")) {
      const auto f = "noise.channels[" + std::to_string(i++) + "]";
      known_keys(ch, f, {"sigma", "cutoff", "h_mode", "h_amp"});
      NoiseChannel k;
      get(ch, f, "sigma", k.sigma), get(ch, f, "cutoff", k.cutoff), get(ch, f, "h_mode", k.h_mode);
      get(ch, f, "h_amp", k.h_amp);
      c.noise.push_back(k);
    }
  }
  const auto& in = section(j, "initial");
  known_keys(in, "initial", {"stripe_amp", "stripe_width", "u_amp"});
  get(in, "initial", "stripe_amp", c.stripe_amp), get(in, "initial", "stripe_width", c.stripe_width);
  get(in, "initial", "u_amp", c.u_amp);
  const auto& ct = section(j, "control");
  known_keys(ct, "control", {"kc", "knots", "coeffs", "p"});
  get(ct, "control", "kc", c.kc), get(ct, "control", "knots", c.knots), get(ct, "control", "coeffs", c.control);
  get(ct, "control", "p", c.p);
  const auto& fa = section(j, "family");
  known_keys(fa, "family", {"bound", "C0", "delta"});
  get(fa, "family", "bound", c.box_bound), get(fa, "family", "C0", c.C0), get(fa, "family", "delta", c.delta);
  const auto& co = section(j, "cost");
  known_keys(co, "cost", {"lambda1", "lambda2", "tracking", "targets", "target_control", "target_csv"});
  get(co, "cost", "lambda1", c.lambda1), get(co, "cost", "lambda2", c.lambda2), get(co, "cost", "tracking", c.tracking);
  get(co, "cost", "targets", c.targets), get(co, "cost", "target_control", c.target_control);
  get(co, "cost", "target_csv", c.target_csv);
  const auto& op = section(j, "optimizer");
  known_keys(op, "optimizer", {"budget", "lhs_seeds", "step0", "min_step", "seed"});
  get(op, "optimizer", "budget", c.optimizer.budget), get(op, "optimizer", "lhs_seeds", c.optimizer.lhs_seeds);
  get(op, "optimizer", "step0", c.optimizer.step0), get(op, "optimizer", "min_step", c.optimizer.min_step);
  get(op, "optimizer", "seed", c.optimizer.seed);
  const auto& v = section(j, "verify");
  known_keys(v, "verify", {"dts", "stability_C"});
  get(v, "verify", "dts", c.verify_dts), get(v, "verify", "stability_C", c.stability_C);
  const auto& a = section(j, "audit");
  known_keys(a, "audit", {"samples", "decay", "nx", "ny"});
  get(a, "audit", "samples", c.audit_samples), get(a, "audit", "decay", c.audit_decay);
  get(a, "audit", "nx", c.audit_nx), get(a, "audit", "ny", c.audit_ny);
  get(j, "config", "out", c.out);
  c.validate();
  return c;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // locate the byte offset as line:column
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n')
        ++line, col = 1;
      else
        ++col;
    }
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col), e.what());
  }
  return config_from_json(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open configuration file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

NoiseModel noise_model(const RunConfig& c) { return make_noise_model(c.noise, c.noise_K); }

AdmissibleFamily family_of(const RunConfig& c) {
  auto f = AdmissibleFamily::symmetric(ControlLayout{c.kc}, c.knots, c.box_bound, c.T > 0 ? c.T : c.dt);
  f.C0 = c.C0;
  f.delta = c.delta;
  f.p = c.p;
  return f;
}

BoundaryControl control_of(const RunConfig& c, const std::vector<double>& coeffs) {
  const ControlLayout L{c.kc};
  const int K = static_cast<int>(c.knots.size());
  if (coeffs.empty()) return BoundaryControl(L, c.knots, Eigen::MatrixXd::Zero(K, L.per_knot()));
  Eigen::MatrixXd m(K, L.per_knot());
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < L.per_knot(); ++j) m(k, j) = coeffs.at(static_cast<std::size_t>(k) * L.per_knot() + j);
  return BoundaryControl(L, c.knots, m);
}

CostWeights weights_of(const RunConfig& c) {
  return {c.lambda1, c.lambda2, c.tracking == "l2" ? TrackingNorm::l2 : TrackingNorm::graded};
}

PathSettings path_settings(const RunConfig& c) {
  PathSettings ps;
  ps.T = c.T;
  ps.dt = c.dt;
  ps.opt.C0 = c.C0;
  ps.opt.p = c.p;
  ps.opt.implicitness = c.implicitness;
  ps.opt.quadrature = TimeQuadrature::trapezoid;
  return ps;
}

Workbench make_workbench(const RunConfig& c) {
  Workbench wb;
  wb.geom = build_geometry(c.nx, c.ny);
  wb.spec = std::make_shared<const Spectrum>(build_spectrum(wb.geom, c.alpha, c.potential.theta));
  wb.basis = std::make_shared<const GalerkinBasis>(galerkin_basis(*wb.spec, c.n));
  return wb;
}

std::shared_ptr<const GalerkinSystem> make_system(const RunConfig& c, const Workbench& wb, const BoundaryControl& ctrl) {
  std::shared_ptr<const LiftingField> lift;
  if (ctrl.coeffs().size() > 0) lift = std::make_shared<const LiftingField>(wb.geom, c.alpha, ctrl);
  return std::make_shared<const GalerkinSystem>(wb.basis, c.potential, lift, noise_model(c));
}

}  // namespace acns
