#include "acns/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace acns {

using nlohmann::json;

namespace {

struct Col {
  const char* name;
  double EnergyRecord::*field;
  const char* meaning;
};

const std::vector<Col>& energy_cols() {
  static const std::vector<Col> c = {
      {"E", &EnergyRecord::E, "energy |u|^2 + |grad phi|^2 + int F(phi)"},
      {"Etilde", &EnergyRecord::Etilde, "balance energy |u|^2 + |grad phi|^2 + 2 int F(phi)"},
      {"Y2", &EnergyRecord::Y2, "|u|^2 + |grad phi|^2"},
      {"V2", &EnergyRecord::V2, "slip norm of u plus |phi|_{H2}^2"},
      {"mu2", &EnergyRecord::mu2, "|grad mu|^2"},
      {"u2", &EnergyRecord::u2, "|u|_{L2}^2"},
      {"u_slip", &EnergyRecord::u_slip, "slip form of u"},
      {"grad_phi2", &EnergyRecord::grad_phi2, "|grad phi|^2"},
      {"phi_h2", &EnergyRecord::phi_h2, "graded H2 norm of phi, squared"},
      {"grad_phi_l4", &EnergyRecord::grad_phi_l4, "|grad phi|_{L4}"},
      {"phi_l2sq", &EnergyRecord::phi_l2sq, "|phi|_{L2}^2"},
      {"lift_l2sq", &EnergyRecord::lift_l2sq, "|lift|_{L2}^2"},
      {"lift_slip", &EnergyRecord::lift_slip, "slip form of the lift"},
      {"hp", &EnergyRecord::hp, "boundary norm |(a,b)|_{H_p}"},
      {"Lambda", &EnergyRecord::Lambda, "hp^2 + 1"},
      {"B", &EnergyRecord::B, "hp^4 + 1"},
      {"ftilde", &EnergyRecord::ftilde, "weight integrand of G"},
      {"G", &EnergyRecord::G, "weight exp(-C0 t - C0 int ftilde)"},
      {"source", &EnergyRecord::source, "source term of the energy balance"},
      {"martingale", &EnergyRecord::martingale, "martingale increment leaving this record"},
      {"residual", &EnergyRecord::residual, "energy balance residual"},
  };
  return c;
}

std::ofstream open_out(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path);
  return f;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> trajectory_columns(const Trajectory& tr) {
  std::vector<std::string> c{"t"};
  if (tr.states.empty()) return c;
  for (Eigen::Index i = 0; i < tr.states[0].beta.size(); ++i) c.push_back("beta_" + std::to_string(i));
  for (Eigen::Index i = 0; i < tr.states[0].chi.size(); ++i) c.push_back("chi_" + std::to_string(i));
  const Eigen::Index ns = tr.lift.empty() ? 0 : tr.lift[0].size();
  for (Eigen::Index i = 0; i < ns; ++i) c.push_back("s_" + std::to_string(i));
  for (const auto& e : energy_cols()) c.push_back(e.name);
  return c;
}

void write_trajectory_csv(const std::string& path, const Trajectory& tr) {
  auto f = open_out(path);
  const auto cols = trajectory_columns(tr);
  for (std::size_t i = 0; i < cols.size(); ++i) f << (i ? "," : "") << cols[i];
  f << "\n";
  const Eigen::Index ns = tr.lift.empty() ? 0 : tr.lift[0].size();
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    const auto& s = tr.states[k];
    f << fmt(s.t);
    for (double x : s.beta) f << "," << fmt(x);
    for (double x : s.chi) f << "," << fmt(x);
    for (Eigen::Index i = 0; i < ns; ++i) f << "," << fmt(i < tr.lift[k].size() ? tr.lift[k][i] : 0.0);
    const auto& r = tr.trace.rec.at(k);
    for (const auto& e : energy_cols()) f << "," << fmt(r.*e.field);
    f << "\n";
  }
  if (!f) throw IoError("write failed: " + path);
}

void write_trace_csv(const std::string& path, const EnergyTrace& tr) {
  auto f = open_out(path);
  f << "t";
  for (const auto& e : energy_cols()) f << "," << e.name;
  f << "\n";
  for (const auto& r : tr.rec) {
    f << fmt(r.t);
    for (const auto& e : energy_cols()) f << "," << fmt(r.*e.field);
    f << "\n";
  }
  if (!f) throw IoError("write failed: " + path);
}

Targets read_targets_csv(const std::vector<std::string>& paths) {
  if (paths.empty()) throw IoError("targets: no files");
  Targets tg;
  for (std::size_t fi = 0; fi < paths.size(); ++fi) {
    std::ifstream f(paths[fi]);
    if (!f) throw IoError("cannot read " + paths[fi]);
    std::string line;
    if (!std::getline(f, line)) throw IoError(paths[fi] + ": empty file");
    const auto head = split(line);
    int it = -1;
    std::vector<int> ib, ic, is;
    for (int i = 0; i < static_cast<int>(head.size()); ++i) {
      const auto& h = head[i];
      if (h == "t") it = i;
      else if (h.rfind("beta_", 0) == 0) ib.push_back(i);
      else if (h.rfind("chi_", 0) == 0) ic.push_back(i);
      else if (h.rfind("s_", 0) == 0) is.push_back(i);
    }
    if (it < 0) throw IoError(paths[fi] + ": missing t column");
    std::size_t k = 0;
    int lineno = 1;
    while (std::getline(f, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto cells = split(line);
      if (cells.size() != head.size())
        throw IoError(paths[fi] + ":" + std::to_string(lineno) + ": expected " + std::to_string(head.size()) +
                      " cells");
      auto num = [&](int i) {
        try {
          return std::stod(cells[i]);
        } catch (const std::exception&) {
          throw IoError(paths[fi] + ":" + std::to_string(lineno) + ": bad number '" + cells[i] + "'");
        }
      };
      auto take = [&](const std::vector<int>& idx) {
        Eigen::VectorXd v(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) v[i] = num(idx[i]);
        return v;
      };
      const double t = num(it);
      if (fi == 0) {
        tg.t.push_back(t);
        tg.beta.push_back(take(ib));
        tg.chi.push_back(take(ic));
        tg.lift.push_back(take(is));
      } else {
        if (k >= tg.t.size() || std::abs(tg.t[k] - t) > 1e-12 * std::max(1.0, std::abs(t)))
          throw IoError(paths[fi] + ": time grid differs from " + paths[0]);
        const auto b = take(ib), c = take(ic), s = take(is);
        if (b.size() != tg.beta[k].size() || c.size() != tg.chi[k].size() || s.size() != tg.lift[k].size())
          throw IoError(paths[fi] + ": column layout differs from " + paths[0]);
        tg.beta[k] += b, tg.chi[k] += c, tg.lift[k] += s;
      }
      ++k;
    }
    if (fi > 0 && k != tg.t.size()) throw IoError(paths[fi] + ": time grid differs from " + paths[0]);
  }
  const double inv = 1.0 / static_cast<double>(paths.size());
  for (std::size_t k = 0; k < tg.t.size(); ++k) tg.beta[k] *= inv, tg.chi[k] *= inv, tg.lift[k] *= inv;
  return tg;
}

json to_json(const MeanCI& m) { return {{"mean", m.mean}, {"se", m.se}, {"lo", m.lo}, {"hi", m.hi}}; }

json to_json(const EstimateReport& r) {
  return {{"name", r.name},         {"paths", r.paths},
          {"lhs", to_json(r.lhs)},  {"rhs", to_json(r.rhs)},
          {"C_hat", r.C_hat},       {"C_interval", {r.C_lo, r.C_hi}},
          {"finite", r.finite},     {"jensen_violations", r.jensen_violations},
          {"lhs_path", r.lhs_path}, {"rhs_path", r.rhs_path}};
}

json to_json(const RefinementReport& r) { return {{"C", r.C}, {"spread", r.spread}, {"pass", r.pass}}; }

json to_json(const DissipationReport& r) {
  return {{"dt", r.dt}, {"residual", r.residual}, {"E0", r.E0}, {"slope", r.slope}};
}

json to_json(const StabilityReport& r) {
  return {{"lhs", r.lhs},         {"rhs", r.rhs},           {"ratio", r.ratio},         {"sup_term", r.sup_term},
          {"int_term", r.int_term}, {"init_term", r.init_term}, {"ctrl_term", r.ctrl_term}};
}

json to_json(const RatioReport& r) {
  return {{"name", r.name},         {"samples", r.samples},     {"skipped", r.skipped},
          {"max_ratio", r.max_ratio}, {"min_ratio", r.min_ratio}, {"argmax", r.argmax},
          {"max_ratio_fine", r.max_ratio_fine}, {"growth", r.growth}, {"trend", r.trend},
          {"finite", r.finite}};
}

json to_json(const CostReport& r) {
  return {{"J", r.J}, {"tracking", r.tracking}, {"penalty", r.penalty}, {"per_path", r.per_path},
          {"ci", to_json(r.ci)}};
}

json to_json(const Admissibility& a) {
  return {{"exponent", a.exponent}, {"value", a.value}, {"margin", a.margin}, {"pass", a.pass}};
}

json to_json(const OptimizerRecord& r) {
  json h = json::array();
  for (const auto& e : r.history) {
    // inf J for inadmissible candidates is stored as null
    h.push_back({{"params", e.params},
                 {"J", std::isfinite(e.J) ? json(e.J) : json(nullptr)},
                 {"se", e.se},
                 {"admissible", e.admissible},
                 {"best_so_far", std::isfinite(e.best_so_far) ? json(e.best_so_far) : json(nullptr)}});
  }
  return {{"history", h},
          {"best_params", r.best_params},
          {"best_J", std::isfinite(r.best_J) ? json(r.best_J) : json(nullptr)},
          {"best_index", r.best_index},
          {"rng_cursor", r.rng_cursor}};
}

OptimizerRecord optimizer_record_from_json(const json& j) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto num = [&](const json& v) { return v.is_null() ? inf : v.get<double>(); };
  try {
    OptimizerRecord r;
    for (const auto& e : j.at("history")) {
      Evaluation ev;
      ev.params = e.at("params").get<std::vector<double>>();
      ev.J = num(e.at("J"));
      ev.se = e.at("se").get<double>();
      ev.admissible = e.at("admissible").get<bool>();
      ev.best_so_far = num(e.at("best_so_far"));
      r.history.push_back(std::move(ev));
    }
    r.best_params = j.at("best_params").get<std::vector<double>>();
    r.best_J = num(j.at("best_J"));
    r.best_index = j.at("best_index").get<int>();
    r.rng_cursor = j.at("rng_cursor").get<long>();
    return r;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed checkpoint: ") + e.what());
  }
}

std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : serialize_config(c)) h = (h ^ ch) * 1099511628211ull;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json manifest(const RunConfig& c, const std::string& command, const std::vector<std::uint64_t>& path_seeds) {
  return {{"tool", "acns"},
          {"version", kVersion},
          {"command", command},
          {"config_hash", config_hash(c)},
          {"master_seed", c.seed},
          {"path_seeds", path_seeds},
          {"config", to_json(c)}};
}

json output_schema() {
  json energy = json::array();
  energy.push_back({{"column", "t"}, {"meaning", "time"}});
  for (const auto& e : energy_cols()) energy.push_back({{"column", e.name}, {"meaning", e.meaning}});
  json traj = json::array();
  traj.push_back({{"column", "t"}, {"meaning", "time"}});
  traj.push_back({{"column", "beta_i"}, {"meaning", "velocity coefficient i (L2-orthonormal slip modes)"}});
  traj.push_back({{"column", "chi_i"}, {"meaning", "phase coefficient i (a_theta-orthonormal Neumann modes)"}});
  traj.push_back({{"column", "s_j"}, {"meaning", "lifting coefficient j"}});
  for (std::size_t i = 1; i < energy.size(); ++i) traj.push_back(energy[i]);
  return {{"version", kVersion},
          {"number_format", "%.17g"},
          {"trajectory_csv", traj},
          {"trace_csv", energy},
          {"json_reports",
           {"manifest.json", "estimates.json", "dissipation.json", "stability.json", "audit.json",
            "optimizer.json", "cost.json"}}};
}

void write_text(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    auto f = open_out(tmp);
    f << text;
    if (!f) throw IoError("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
}

}  // namespace acns
