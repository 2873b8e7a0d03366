// occuval: simulate, sweep, certify and export the F-16 dutch-roll loops.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "occuval/f16/pipeline.hpp"
#include "occuval/f16/problem_file.hpp"
#include "occuval/liouville/export.hpp"
#include "occuval/liouville/relaxation.hpp"
#include "occuval/sdp/hierarchy.hpp"
#include "occuval/sdp/solver.hpp"
#include "occuval/sim/integrate.hpp"
#include "occuval/sim/plot_data.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace occuval;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kError = 1, kNotCertified = 2, kInconclusive = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string problem;
  std::string mode = "lqr";
  std::string phi_max = "nominal";
  std::string grid;
  std::optional<double> dt;
  std::string method;
  std::optional<double> threshold;
  std::string out = "occuval-out";
};

struct CertifyArgs {
  std::string orders;
  bool sparse = false;
  bool dense = false;
  std::string chart = "unit";
  std::string backend;
  std::string sdpa_export;
  bool skip_mc = false;
  unsigned workers = 0;
};

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<double> parse_list(const std::string& s, const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(field + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError(field + ": empty list");
  return out;
}

std::vector<int> parse_orders(const std::string& s) {
  const auto dots = s.find("..");
  int a = 0, b = 0;
  try {
    if (dots == std::string::npos) {
      a = b = std::stoi(s);
    } else {
      a = std::stoi(s.substr(0, dots));
      b = std::stoi(s.substr(dots + 2));
    }
  } catch (const std::exception&) {
    throw UsageError("--orders: expected a..b, got '" + s + "'");
  }
  if (a < 1 || b < a) throw UsageError("--orders: need 1 <= a <= b, got '" + s + "'");
  std::vector<int> out;
  for (int d = a; d <= b; ++d) out.push_back(d);
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("I/O error: cannot write " + path.string());
  f << text;
}

fs::path prepare_out(const std::string& dir) {
  const fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw UsageError("--out: cannot create " + dir + ": " + ec.message());
  return p;
}

f16::ProblemFile load(const Common& c) {
  f16::ProblemFile pf =
      c.problem.empty() ? f16::default_problem() : f16::load_problem(c.problem);
  if (!c.grid.empty()) {
    pf.grid.clear();
    for (double v : parse_list(c.grid, "--grid")) {
      if (v < 1 || v != std::floor(v)) throw UsageError("--grid: counts must be positive integers");
      pf.grid.push_back(static_cast<std::size_t>(v));
    }
  }
  if (c.dt) pf.dt = *c.dt;
  if (!c.method.empty()) {
    try {
      pf.method = sim::parse_method(c.method);
    } catch (const std::exception& e) {
      throw UsageError(std::string("--method: ") + e.what());
    }
  }
  if (c.threshold) pf.threshold = *c.threshold;
  try {
    pf.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  return pf;
}

f16::Case make_case(const f16::ProblemFile& pf, const Common& c) {
  f16::Case out;
  try {
    out.mode = f16::parse_mode(c.mode);
  } catch (const std::exception& e) {
    throw UsageError(std::string("--mode: ") + e.what());
  }
  try {
    out.phi_max = pf.phi_max(c.phi_max);
  } catch (const std::exception& e) {
    throw UsageError(std::string("--phi-max: ") + e.what());
  }
  return out;
}

std::vector<std::string> state_names(f16::LoopMode mode) {
  std::vector<std::string> out;
  for (const auto& v : f16::case_states(mode)) out.push_back(v.name());
  return out;
}

json named(const Eigen::VectorXd& x, const std::vector<std::string>& names) {
  json j = json::object();
  for (Eigen::Index i = 0; i < x.size(); ++i) j[names[static_cast<std::size_t>(i)]] = x(i);
  return j;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--problem", c.problem, "problem file (JSON); defaults to the built-in F-16 instance");
  app->add_option("--mode", c.mode, "lqr or mrac")->check(CLI::IsMember({"lqr", "mrac"}));
  app->add_option("--phi-max", c.phi_max, "nominal, degraded or a value in rad");
  app->add_option("--grid", c.grid, "grid points per x_q state, e.g. 5,5,5,5");
  app->add_option("--dt", c.dt, "integration step [s]");
  app->add_option("--method", c.method, "euler or rk4");
  app->add_option("--threshold", c.threshold, "certification threshold on J");
  app->add_option("--out", c.out, "output directory");
}

// simulate ----------------------------------------------------------------

struct SimulateArgs {
  std::string x0;
  std::optional<double> horizon;
  std::size_t record_every = 10;
  bool reference_only = false;
};

int cmd_simulate(const Common& common, const SimulateArgs& a) {
  auto pf = load(common);
  auto c = make_case(pf, common);
  if (a.reference_only) c.mode = f16::LoopMode::kMrac;
  const auto names = state_names(c.mode);
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(names.size()));
  if (!a.x0.empty()) {
    const auto v = parse_list(a.x0, "--x0");
    if (v.size() != names.size()) {
      throw UsageError("--x0: expected " + std::to_string(names.size()) + " values");
    }
    for (std::size_t i = 0; i < v.size(); ++i) x0(static_cast<Eigen::Index>(i)) = v[i];
  }
  const double horizon = a.horizon.value_or(pf.horizon);
  if (horizon < 0) throw UsageError("--horizon: must be >= 0");

  const auto sys = f16::physical_system(pf, c);
  sim::IntegrationOptions io;
  io.dt = pf.dt;
  io.method = pf.method;
  io.record_every = a.record_every;
  sim::Trajectory traj;
  if (horizon == 0.0) {
    traj.dt = pf.dt;
    traj.times = {0.0};
    traj.states = {x0};
    traj.cells = {0};
    traj.peak_abs = x0.cwiseAbs();
  } else {
    traj = sim::integrate(sys, x0, horizon, io);
  }
  const double J = f16::tracking_cost(traj.terminal().head<4>(), pf.command);

  const fs::path out = prepare_out(common.out);
  std::vector<fs::path> files;
  if (a.reference_only) {
    // x_r channels only, laid out as their own trajectory
    sim::Trajectory ref = traj;
    for (auto& s : ref.states) s = Eigen::VectorXd(s.tail<4>());
    ref.peak_abs = traj.peak_abs.tail<4>();
    files = sim::emit_plot_data({ref}, std::nullopt,
                                {names[5], names[6], names[7], names[8]}, out);
  } else {
    files = sim::emit_plot_data({traj}, std::nullopt, names, out);
  }

  json j;
  j["schema"] = "occuval.simulation/1";
  j["mode"] = f16::to_string(c.mode);
  j["phi_max"] = c.phi_max;
  j["horizon"] = horizon;
  j["dt"] = pf.dt;
  j["method"] = sim::to_string(pf.method);
  j["initial"] = named(x0, names);
  j["terminal"] = named(traj.terminal(), names);
  j["cost"] = J;
  j["first_exit"] = nullptr;
  if (traj.first_exit) {
    j["first_exit"] = {{"time", traj.first_exit->time},
                       {"state", names[traj.first_exit->component]}};
  }
  json fl = json::array();
  for (const auto& f : files) fl.push_back(f.filename().string());
  j["files"] = fl;
  write_file(out / "summary.json", j.dump(2) + "\n");
  std::printf("J = %.6g at T = %g s (%s, phi_max = %g)\n", J, horizon,
              f16::to_string(c.mode).c_str(), c.phi_max);
  std::printf("wrote %zu CSV files and summary.json to %s\n", files.size(),
              out.string().c_str());
  return kOk;
}

// mc ----------------------------------------------------------------------

sdp::MonteCarloSummary summarize(const sim::SweepReport& r,
                                 const std::vector<std::string>& names,
                                 double threshold) {
  sdp::MonteCarloSummary s;
  s.worst_cost = r.worst_cost;
  s.argmax_initial = r.argmax_initial;
  s.state_names = names;
  s.trajectories = r.costs.size();
  s.violations = r.violations.size();
  for (double v : r.costs) {
    if (std::isnan(v)) ++s.diverged;
  }
  (void)threshold;
  return s;
}

json sweep_json(const sim::SweepReport& r, const f16::ProblemFile& pf,
                const f16::Case& c, const sim::SweepSpec& spec,
                const std::vector<std::string>& names) {
  json j;
  j["schema"] = "occuval.montecarlo/1";
  j["mode"] = f16::to_string(c.mode);
  j["phi_max"] = c.phi_max;
  j["grid"] = spec.grid_counts;
  j["dt"] = spec.dt;
  j["method"] = sim::to_string(spec.method);
  j["horizon"] = spec.horizon;
  j["threshold"] = pf.threshold;
  j["trajectories"] = r.costs.size();
  j["worst_cost"] = r.worst_cost;
  j["argmax_index"] = r.argmax_index;
  j["argmax_initial"] = named(r.argmax_initial, names);
  json costs = json::array();
  for (double v : r.costs) {
    if (std::isnan(v)) costs.push_back(nullptr);
    else costs.push_back(v);
  }
  j["costs"] = costs;
  json viol = json::array();
  for (const auto& v : r.violations) {
    viol.push_back({{"trajectory", v.trajectory},
                    {"kind", v.kind == sim::Violation::Kind::kExit ? "exit" : "divergence"},
                    {"time", v.time},
                    {"detail", v.detail}});
  }
  j["violations"] = viol;
  j["metadata"] = {{"generated_at", utc_now()},
                   {"tool_version", kVersion},
                   {"wall_seconds", r.wall_seconds},
                   {"workers", r.workers}};
  return j;
}

int cmd_mc(const Common& common, unsigned workers) {
  const auto pf = load(common);
  const auto c = make_case(pf, common);
  const auto names = state_names(c.mode);
  const auto spec = f16::sweep_spec(pf, c.mode);
  const auto r = f16::run_monte_carlo(pf, c, spec, workers);
  const fs::path out = prepare_out(common.out);
  write_file(out / "montecarlo.json", sweep_json(r, pf, c, spec, names).dump(2) + "\n");

  std::printf("%-10s %-6s %-14s %-8s %-10s %s\n", "phi_max", "mode", "worst J",
              "trajs", "violations", "cpu [s]");
  std::printf("%-10.6g %-6s %-14.5g %-8zu %-10zu %.4g\n", c.phi_max,
              f16::to_string(c.mode).c_str(), r.worst_cost, r.costs.size(),
              r.violations.size(), r.wall_seconds);
  std::printf("argmax initial condition:");
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::printf(" %s=%.6g", names[i].c_str(), r.argmax_initial(static_cast<Eigen::Index>(i)));
  }
  std::printf("\n");
  return kOk;
}

// certify / export ----------------------------------------------------------

sdp::SolverOptions solver_options(const CertifyArgs& a) {
  sdp::SolverOptions o;
  try {
    o = sdp::SolverOptions::from_env();
  } catch (const std::exception& e) {
    throw UsageError(std::string("OCCUVAL_SOLVER_PRESET: ") + e.what());
  }
  if (!a.backend.empty()) o.backend = a.backend;
  return o;
}

liouville::RelaxationOptions relaxation_options(const CertifyArgs& a, f16::LoopMode mode) {
  if (a.sparse && a.dense) throw UsageError("--sparse and --dense are exclusive");
  liouville::RelaxationOptions r;
  r.sparse = a.dense ? false : (a.sparse || mode == f16::LoopMode::kMrac);
  r.chart = a.chart == "symmetric" ? liouville::TimeChart::kSymmetric
                                   : liouville::TimeChart::kUnit;
  return r;
}

fs::path order_path(const fs::path& base, int d, bool many) {
  if (!many) return base;
  fs::path p = base;
  p.replace_filename(base.stem().string() + "_d" + std::to_string(d) +
                     base.extension().string());
  return p;
}

int cmd_certify(const Common& common, const CertifyArgs& a) {
  const auto pf = load(common);
  const auto c = make_case(pf, common);
  const auto names = state_names(c.mode);
  sdp::HierarchyOptions ho;
  if (a.orders.empty()) {
    const auto& r = c.mode == f16::LoopMode::kLqr ? pf.lqr_orders : pf.mrac_orders;
    for (int d = r[0]; d <= r[1]; ++d) ho.orders.push_back(d);
  } else {
    ho.orders = parse_orders(a.orders);
  }
  ho.relaxation = relaxation_options(a, c.mode);
  ho.solver = solver_options(a);
  ho.threshold = pf.threshold;
  const bool many = ho.orders.size() > 1;
  if (!a.sdpa_export.empty()) {
    const fs::path base(a.sdpa_export);
    ho.on_assembled = [base, many](const liouville::MomentRelaxation& r) {
      liouville::write_sdpa(r.problem, order_path(base, r.order, many));
    };
  }
  ho.on_solved = [](const sdp::OrderResult& o) {
    std::fprintf(stderr, "d=%d %s bound=%.6g (%.3g s, largest block %zu)\n", o.order,
                 sdp::to_string(o.solve.status).c_str(), o.solve.bound,
                 o.solve.solve_seconds, o.largest_block);
  };
  const fs::path out = prepare_out(common.out);

  std::optional<sdp::MonteCarloSummary> mc;
  if (!a.skip_mc) {
    const auto spec = f16::sweep_spec(pf, c.mode);
    const auto r = f16::run_monte_carlo(pf, c, spec, a.workers);
    write_file(out / "montecarlo.json", sweep_json(r, pf, c, spec, names).dump(2) + "\n");
    mc = summarize(r, names, pf.threshold);
  }

  const auto prob = f16::validation_problem(pf, c);
  sdp::CertificationReport rep;
  try {
    rep = sdp::run_hierarchy(prob, ho, mc);
  } catch (const sdp::SandwichError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kError;
  }
  std::ostringstream extra;
  extra << "orders";
  for (int d : ho.orders) extra << " " << d;
  extra << " sparse " << ho.relaxation.sparse << " chart "
        << liouville::to_string(ho.relaxation.chart) << " backend " << ho.solver.backend
        << " preset " << ho.solver.preset << " mc " << !a.skip_mc;
  rep.config_hash = sdp::hex64(f16::config_hash(pf, c, extra.str()));
  const auto model = f16::make_model(pf);
  rep.notes.insert(rep.notes.begin(),
                   "feedback sign S = " + std::to_string(model.feedback_sign()));

  sdp::ReportMetadata meta{utc_now(), kVersion, ho.solver.backend, ho.solver.preset};
  write_file(out / "report.json", sdp::report_json(rep, meta));
  std::printf("%s, phi_max = %g, %s\n", f16::to_string(c.mode).c_str(), c.phi_max,
              rep.sparse ? "sparse" : "dense");
  std::fputs(sdp::report_table(rep).c_str(), stdout);
  switch (rep.verdict) {
    case sdp::Verdict::kCertified: return kOk;
    case sdp::Verdict::kNotCertified: return kNotCertified;
    case sdp::Verdict::kInconclusive: return kInconclusive;
  }
  return kError;
}

int cmd_export(const Common& common, const CertifyArgs& a, int order) {
  const auto pf = load(common);
  const auto c = make_case(pf, common);
  const auto prob = f16::validation_problem(pf, c);
  const int d = order > 0 ? order : liouville::minimum_order(prob);
  const auto relax = liouville::assemble_relaxation(prob, d, relaxation_options(a, c.mode));
  const fs::path out = prepare_out(common.out);
  const fs::path json_path = out / ("relaxation_d" + std::to_string(d) + ".json");
  liouville::write_relaxation_json(relax, json_path);
  std::printf("wrote %s (%zu moments, %zu rows, %zu blocks, largest %zu)\n",
              json_path.string().c_str(), relax.problem.num_vars,
              relax.problem.rows.size(), relax.problem.blocks.size(),
              relax.largest_block_side());
  if (!a.sdpa_export.empty()) {
    liouville::write_sdpa(relax.problem, a.sdpa_export);
    std::printf("wrote %s\n", a.sdpa_export.c_str());
  }
  return kOk;
}

void add_certify_flags(CLI::App* app, CertifyArgs& a) {
  app->add_flag("--sparse", a.sparse, "use the sparse (split) relaxation");
  app->add_flag("--dense", a.dense, "use the dense relaxation");
  app->add_option("--chart", a.chart, "time chart: unit or symmetric")
      ->check(CLI::IsMember({"unit", "symmetric"}));
  app->add_option("--sdpa-export", a.sdpa_export, "write the SDPA text of each order");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Worst-case tracking bounds for piecewise-polynomial flight loops"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common common;
  SimulateArgs sim_args;
  CertifyArgs cert;
  unsigned mc_workers = 0;
  int export_order = 0;

  auto* sim_cmd = app.add_subcommand("simulate", "integrate one trajectory and write CSV plot data");
  add_common(sim_cmd, common);
  sim_cmd->add_option("--x0", sim_args.x0, "initial state, comma separated");
  sim_cmd->add_option("--horizon", sim_args.horizon, "override the horizon [s]");
  sim_cmd->add_option("--record-every", sim_args.record_every, "keep every k-th sample");
  sim_cmd->add_flag("--reference-only", sim_args.reference_only,
                    "emit only the reference model channels");

  auto* mc_cmd = app.add_subcommand("mc", "Monte-Carlo grid sweep over the initial box");
  add_common(mc_cmd, common);
  mc_cmd->add_option("--workers", mc_workers, "threads (0 = all cores)");

  auto* cert_cmd = app.add_subcommand("certify", "run the moment hierarchy and issue a verdict");
  add_common(cert_cmd, common);
  cert_cmd->add_option("--orders", cert.orders, "relaxation orders a..b");
  add_certify_flags(cert_cmd, cert);
  cert_cmd->add_option("--backend", cert.backend, "conic backend (ipm, clarabel)");
  cert_cmd->add_flag("--skip-mc", cert.skip_mc, "skip the Monte-Carlo lower bound");
  cert_cmd->add_option("--workers", cert.workers, "Monte-Carlo threads (0 = all cores)");

  auto* exp_cmd = app.add_subcommand("export", "write one relaxation as JSON and optionally SDPA");
  add_common(exp_cmd, common);
  exp_cmd->add_option("--order", export_order, "relaxation order (default: minimum)");
  add_certify_flags(exp_cmd, cert);

  std::string problem_out;
  auto* prob_cmd = app.add_subcommand("problem", "write the built-in problem file");
  prob_cmd->add_option("path", problem_out, "destination JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }

  try {
    if (sim_cmd->parsed()) return cmd_simulate(common, sim_args);
    if (mc_cmd->parsed()) return cmd_mc(common, mc_workers);
    if (cert_cmd->parsed()) return cmd_certify(common, cert);
    if (exp_cmd->parsed()) return cmd_export(common, cert, export_order);
    if (prob_cmd->parsed()) {
      f16::save_problem(f16::default_problem(), problem_out);
      return kOk;
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kError;
  }
  return kError;
}
