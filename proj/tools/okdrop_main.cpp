// okdrop: batch driver for the droplet experiments.
//
// Exit codes: 0 success, 1 usage or input error, 2 an invariant failed.
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "okdrop/diffuse.hpp"
#include "okdrop/error.hpp"
#include "okdrop/experiments.hpp"
#include "okdrop/format.hpp"
#include "okdrop/green.hpp"
#include "okdrop/limit_energy.hpp"
#include "okdrop/minimizer.hpp"
#include "okdrop/parallel.hpp"
#include "okdrop/sharp_energy.hpp"

using namespace okdrop;
using json = nlohmann::ordered_json;

namespace {

struct Spec {
  std::string command;
  TorusParams params{1.0, 2.0 / 3.0, 1.0};
  std::vector<double> eps;
  int grid = 0;  // 0: per-command default
  std::uint64_t seed = 42;
  double gamma = 1.0 / 6.0;
  std::string out;
  std::string config;
  // relax
  int count = 20;
  int rounds = 20;
  int steps = 200;
  double step = 0.05;
  // diffuse-compare
  int relax_steps = 20;
  std::string droplets;
};

// Thrown when a run finished but a checked invariant did not hold.
struct InvariantFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json spec_json(const Spec& s) {
  json j;
  j["command"] = s.command;
  j["ell"] = s.params.ell;
  j["kappa"] = s.params.kappa;
  j["delta_bar"] = s.params.delta_bar;
  j["eps"] = s.eps;
  j["grid"] = s.grid;
  j["seed"] = s.seed;
  j["gamma"] = s.gamma;
  j["out"] = s.out;
  if (!s.config.empty()) j["config"] = s.config;
  if (s.command == "relax") {
    j["count"] = s.count;
    j["rounds"] = s.rounds;
    j["steps"] = s.steps;
    j["step"] = s.step;
  }
  if (s.command == "diffuse-compare") {
    j["relax_steps"] = s.relax_steps;
    if (!s.droplets.empty()) j["droplets"] = s.droplets;
  }
  return j;
}

std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void validate_eps(const std::vector<double>& eps) {
  if (eps.empty()) throw ParameterError("--eps needs at least one value");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    Scaling check(eps[i]);
    if (i > 0 && !(eps[i] < eps[i - 1])) throw ParameterError("--eps must be strictly decreasing");
  }
}

// Each command writes CSV text to `out` and fills `summary`.
void cmd_green(const Spec& s, std::ostream& out, json& summary) {
  const int n = s.grid ? s.grid : 512;
  const GreenEvaluator g = build_green(s.params);
  const auto r = green_selftest(g, n);
  out << "quantity,value\n";
  for (const auto& [k, v] : r) {
    out << k << ',' << fmt17(v) << '\n';
    summary[k] = v;
  }
  if (r.at("pass") != 1.0) throw InvariantFailure("Green identities outside tolerance");
}

void cmd_sweep(const Spec& s, std::ostream& out, json& summary) {
  std::vector<double> eps = s.eps.empty() ? std::vector<double>{1e-3, 1e-6, 1e-9, 1e-12} : s.eps;
  validate_eps(eps);
  SweepOptions opt;
  opt.seed = s.seed;
  opt.gamma = s.gamma;
  if (s.grid) opt.density_grid = s.grid;
  const GreenEvaluator g = build_green(s.params);
  const auto rows = recovery_sweep(s.params, eps, g, opt);
  write_sweep_csv(out, rows);
  const bool trend = gap_strictly_decreasing(rows);
  out << "# gap trend: " << (trend ? "strictly decreasing" : "NOT strictly decreasing") << '\n';
  summary["gap_strictly_decreasing"] = trend;
  double mmin = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) mmin = i ? std::min(mmin, rows[i].defect) : rows[i].defect;
  summary["min_defect"] = mmin;
  if (!rows.empty()) summary["final_relative_gap"] = rows.back().gap / std::abs(rows.back().target);
  if (mmin < -1e-9) throw InvariantFailure("defect M below -1e-9");
}

void cmd_relax(const Spec& s, std::ostream& out, json& summary) {
  std::vector<double> eps = s.eps.empty() ? std::vector<double>{1e-8} : s.eps;
  validate_eps(eps);
  if (eps.size() != 1) throw ParameterError("relax takes a single --eps value");
  const GreenEvaluator g = build_green(s.params);
  const DropletConfig start = random_disk_ensemble(s.params, eps[0], s.count, 0.5, 2.0, s.seed);
  const RelaxResult r = relax_joint(start, g, s.rounds, s.steps, s.step);
  write_trace_csv(out, r.trace);
  const EnsembleStats st = ensemble_stats(r.config, s.gamma);
  summary["converged"] = r.converged;
  summary["final_energy"] = r.trace.back().energy;
  summary["in_window_count"] = st.in_window_count;
  summary["area_mean"] = st.area_mean;
  summary["area_cv"] = st.area_mean > 0 ? std::sqrt(st.area_variance) / st.area_mean : 0.0;
  summary["out_window_mass"] = st.out_window_mass;
  summary["deficit_sum"] = st.deficit_sum;
  summary["count_density"] = st.count_density;
  summary["nearest_neighbor_cv"] = nearest_neighbor_cv(r.config);
  if (!s.out.empty()) {
    save_config(s.out + ".config", r.config);
    summary["final_config"] = s.out + ".config";
  }
  for (std::size_t i = 1; i < r.trace.size(); ++i)
    if (r.trace[i].energy > r.trace[i - 1].energy) throw InvariantFailure("relaxation energy increased");
}

void cmd_diffuse(const Spec& s, std::ostream& out, json& summary) {
  std::vector<DropletConfig> configs;
  if (!s.droplets.empty()) {
    configs.push_back(load_config(s.droplets));
  } else {
    std::vector<double> eps = s.eps.empty() ? std::vector<double>{5e-3} : s.eps;
    validate_eps(eps);
    for (double e : eps) {
      DropletConfig c;
      c.params = s.params;
      c.epsilon = e;
      const double mid = 0.5 * s.params.ell;
      c.droplets = {Droplet::disk({mid, mid}, Scaling(e).optimal_radius())};
      configs.push_back(c);
    }
  }
  std::vector<ComparisonReport> rows;
  json rel = json::array();
  for (const auto& c : configs) {
    const GreenEvaluator g = build_green(c.params);
    rows.push_back(compare_energies(c, g, s.grid ? s.grid : 1024, s.relax_steps));
    rel.push_back(rows.back().ratio_relaxed);
  }
  write_comparison_csv(out, rows);
  summary["ratio_relaxed"] = rel;
  summary["kappa_matches_well"] = rows.front().kappa_matches_well;
}

void cmd_limit(const Spec& s, std::ostream& out, json& summary) {
  const OptimalDensity od = optimal_constant_density(s.params);
  const ScalarMinimum num = minimize_constant_density(s.params);
  const ScalarMinimum prof = minimize_profile();
  const double ell2 = s.params.ell * s.params.ell;
  const bool empty = s.params.delta_bar <= od.delta_c;
  out << "quantity,value\n";
  out << "delta_c," << fmt17(od.delta_c) << '\n';
  out << "mu_bar," << fmt17(od.mu_bar) << '\n';
  out << "min_energy_density," << fmt17(od.min_energy_density) << '\n';
  out << "numeric_mu_bar," << fmt17(num.argmin) << '\n';
  out << "numeric_min_energy_density," << fmt17(num.value / ell2) << '\n';
  out << "profile_argmin," << fmt17(kOptimalArea) << '\n';
  out << "numeric_profile_argmin," << fmt17(prof.argmin) << '\n';
  out << "profile_min," << fmt17(kThreeTwoThirds) << '\n';
  out << "numeric_profile_min," << fmt17(prof.value) << '\n';
  out << "# branch: " << (empty ? "mu_bar = 0 (delta_bar <= delta_c)" : "mu_bar = (delta_bar - delta_c) / 2") << '\n';
  summary["branch"] = empty ? "empty" : "constant";
  summary["mu_bar"] = od.mu_bar;
  summary["numeric_mu_bar"] = num.argmin;
  const double tol = 1e-8;
  const bool ok = std::abs(num.argmin - od.mu_bar) <= tol * std::max(1.0, od.mu_bar) &&
                  std::abs(num.value / ell2 - od.min_energy_density) <= tol * od.min_energy_density &&
                  std::abs(prof.argmin - kOptimalArea) <= tol * kOptimalArea &&
                  std::abs(prof.value - kThreeTwoThirds) <= tol * kThreeTwoThirds;
  if (!ok) throw InvariantFailure("numerical minimizers disagree with the closed forms");
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const ParameterError*>(&e) || dynamic_cast<const IoError*>(&e) ||
      dynamic_cast<const DomainError*>(&e) || dynamic_cast<const GeometryError*>(&e))
    return 1;
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  Spec s;
  CLI::App app{"Droplet-regime experiments for the screened Ohta-Kawasaki energy on a flat torus"};
  app.set_config("--config", "", "key=value file; command-line flags take precedence")->check(CLI::ExistingFile);
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--kappa", s.params.kappa, "screening constant")->capture_default_str();
  app.add_option("--delta-bar,--delta_bar", s.params.delta_bar, "background parameter")->capture_default_str();
  app.add_option("--ell", s.params.ell, "torus side")->capture_default_str();
  app.add_option("--eps", s.eps, "comma list, strictly decreasing, each in (0, 1/e)")->delimiter(',');
  app.add_option("--grid", s.grid, "grid size (0 = command default)");
  app.add_option("--seed", s.seed)->capture_default_str();
  app.add_option("--gamma", s.gamma, "area window parameter")->capture_default_str();
  app.add_option("--out", s.out, "CSV output path (stdout if omitted); sidecar JSON at <out>.json");

  app.add_subcommand("green-selftest", "integral, H*H = G and remainder identities");
  app.add_subcommand("recover-sweep", "recovery construction across eps at the optimal constant density");
  auto* relax = app.add_subcommand("relax", "joint relaxation of a random disk ensemble");
  relax->add_option("--count", s.count, "number of droplets")->capture_default_str();
  relax->add_option("--rounds", s.rounds)->capture_default_str();
  relax->add_option("--steps", s.steps, "steps per pass")->capture_default_str();
  relax->add_option("--step", s.step, "initial center step")->capture_default_str();
  auto* diffuse = app.add_subcommand("diffuse-compare", "sharp vs diffuse energy of a lifted configuration");
  diffuse->add_option("--relax-steps,--relax_steps", s.relax_steps)->capture_default_str();
  diffuse->add_option("--droplets", s.droplets, "droplet config file (default: one optimal disk per eps)");
  app.add_subcommand("limit-check", "closed-form limit minimizer vs numerical minimization");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  s.command = app.get_subcommands().front()->get_name();
  if (auto* opt = app.get_option("--config"); opt->count() > 0) s.config = opt->as<std::string>();

  std::unique_ptr<std::ofstream> file;
  if (!s.out.empty()) {
    file = std::make_unique<std::ofstream>(s.out, std::ios::binary);
    if (!*file) {
      std::cerr << "okdrop: cannot write " << s.out << '\n';
      return 1;
    }
  }
  std::ostream& out = file ? static_cast<std::ostream&>(*file) : std::cout;

  json summary = json::object();
  int rc = 0;
  std::string failure;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    s.params.validate();
    if (!(s.gamma > 0.0 && s.gamma < 1.0)) throw ParameterError("--gamma must lie in (0, 1)");
    if (s.grid < 0) throw ParameterError("--grid must be >= 0");
    if (s.command == "green-selftest") cmd_green(s, out, summary);
    else if (s.command == "recover-sweep") cmd_sweep(s, out, summary);
    else if (s.command == "relax") cmd_relax(s, out, summary);
    else if (s.command == "diffuse-compare") cmd_diffuse(s, out, summary);
    else cmd_limit(s, out, summary);
  } catch (const InvariantFailure& e) {
    rc = 2;
    failure = e.what();
  } catch (const Error& e) {
    rc = exit_code_for(e);
    failure = e.what();
  } catch (const std::exception& e) {
    rc = 2;
    failure = e.what();
  }
  if (rc != 0) {
    out << "FAILED: " << failure << '\n';
    std::cerr << "okdrop " << s.command << ": " << failure << '\n';
  }
  out.flush();

  if (!s.out.empty()) {
    json side;
    side["spec"] = spec_json(s);
    side["timestamp"] = utc_timestamp();
    side["threads"] = worker_count();
    side["runtime_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    side["exit_code"] = rc;
    side["status"] = rc == 0 ? "ok" : "FAILED";
    if (rc != 0) side["failure"] = failure;
    side["summary"] = summary;
    std::ofstream js(s.out + ".json");
    js << side.dump(2) << '\n';
    if (!js) {
      std::cerr << "okdrop: cannot write " << s.out << ".json\n";
      return 1;
    }
  }
  return rc;
}
