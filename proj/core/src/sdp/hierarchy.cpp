#include "occuval/sdp/hierarchy.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

namespace occuval::sdp {

using nlohmann::json;

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kCertified: return "certified";
    case Verdict::kNotCertified: return "not-certified";
    case Verdict::kInconclusive: return "inconclusive";
  }
  return "?";
}

Verdict verdict(double bound, double mc_value, double threshold) {
  if (bound < mc_value - kSandwichTolerance) {
    std::ostringstream os;
    os << "sandwich violated: relaxation bound " << bound
       << " is below the simulated worst case " << mc_value;
    throw SandwichError(os.str());
  }
  if (bound <= threshold) return Verdict::kCertified;
  if (mc_value > threshold) return Verdict::kNotCertified;
  return Verdict::kInconclusive;
}

std::optional<double> CertificationReport::final_bound() const {
  for (auto it = orders.rbegin(); it != orders.rend(); ++it) {
    if (it->solve.has_bound()) return it->solve.bound;
  }
  return std::nullopt;
}

CertificationReport run_hierarchy(const liouville::ValidationProblem& prob,
                                  const HierarchyOptions& opts,
                                  const std::optional<MonteCarloSummary>& mc) {
  if (opts.orders.empty()) throw std::invalid_argument("empty order range");
  for (std::size_t k = 1; k < opts.orders.size(); ++k) {
    if (opts.orders[k] <= opts.orders[k - 1]) {
      throw std::invalid_argument("orders must be strictly increasing");
    }
  }
  CertificationReport rep;
  rep.label = prob.label;
  rep.sparse = opts.relaxation.sparse && prob.split.has_value();
  rep.chart = opts.relaxation.chart;
  rep.threshold = opts.threshold;
  rep.monte_carlo = mc;

  std::optional<double> prev;
  for (int d : opts.orders) {
    OrderResult o;
    o.order = d;
    const auto t0 = std::chrono::steady_clock::now();
    const auto relax = liouville::assemble_relaxation(prob, d, opts.relaxation);
    o.assembly_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.num_vars = relax.problem.num_vars;
    o.num_rows = relax.problem.rows.size();
    o.num_blocks = relax.problem.blocks.size();
    o.largest_block = relax.largest_block_side();
    o.problem_hash = hex64(relax.problem.hash());
    o.warnings = relax.warnings;
    if (opts.on_assembled) opts.on_assembled(relax);
    o.solve = solve(relax.problem, opts.solver);
    o.solve.y.resize(0);  // moments are not part of the report

    if (o.solve.has_bound()) {
      if (mc && o.solve.bound < mc->worst_cost - kSandwichTolerance) {
        std::ostringstream os;
        os << "sandwich violated at d=" << d << ": bound " << o.solve.bound
           << " < Monte-Carlo worst case " << mc->worst_cost;
        throw SandwichError(os.str());
      }
      if (prev && o.solve.bound > *prev + kMonotoneTolerance) {
        rep.monotone = false;
        std::ostringstream os;
        os << "monotonicity violated at d=" << d << ": " << o.solve.bound
           << " > " << *prev;
        rep.notes.push_back(os.str());
      }
      prev = o.solve.bound;
    } else {
      rep.notes.push_back("d=" + std::to_string(d) + ": " + to_string(o.solve.status) +
                          (o.solve.message.empty() ? "" : " (" + o.solve.message + ")"));
    }
    if (opts.on_solved) opts.on_solved(o);
    rep.orders.push_back(std::move(o));
  }

  const double mc_value = mc ? mc->worst_cost : -std::numeric_limits<double>::infinity();
  if (const auto b = rep.final_bound()) {
    rep.verdict = verdict(*b, mc_value, opts.threshold);
  } else if (mc && mc->worst_cost > opts.threshold) {
    rep.verdict = Verdict::kNotCertified;
  } else {
    rep.verdict = Verdict::kInconclusive;
    rep.notes.push_back("no order produced a bound");
  }
  if (rep.verdict == Verdict::kNotCertified && mc) {
    rep.violating_initial = mc->argmax_initial;
  }
  return rep;
}

namespace {

json vector_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json named_state(const Eigen::VectorXd& v, const std::vector<std::string>& names) {
  json out = json::object();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const std::string key = static_cast<std::size_t>(i) < names.size()
                                ? names[static_cast<std::size_t>(i)]
                                : "x" + std::to_string(i);
    out[key] = v(i);
  }
  return out;
}

}  // namespace

std::string report_json(const CertificationReport& r, const ReportMetadata& meta) {
  json j;
  j["schema"] = kReportSchema;
  j["label"] = r.label;
  j["config_hash"] = r.config_hash;
  j["sparse"] = r.sparse;
  j["time_chart"] = liouville::to_string(r.chart);
  j["threshold"] = r.threshold;
  json orders = json::array();
  json timings = json::array();
  for (const auto& o : r.orders) {
    json row = {{"d", o.order},
                {"status", to_string(o.solve.status)},
                {"verified", o.solve.verified},
                {"num_vars", o.num_vars},
                {"num_rows", o.num_rows},
                {"num_blocks", o.num_blocks},
                {"largest_block", o.largest_block},
                {"problem_hash", o.problem_hash}};
    if (o.solve.has_bound()) {
      row["bound"] = o.solve.bound;
      row["concave_value"] = -o.solve.bound;
      row["gap"] = o.solve.gap;
      row["primal_infeasibility"] = o.solve.primal_infeasibility;
      row["dual_infeasibility"] = o.solve.dual_infeasibility;
      row["min_eigenvalue"] = o.solve.min_eigenvalue;
      row["equality_residual"] = o.solve.equality_residual;
    } else {
      row["bound"] = nullptr;
    }
    if (!o.solve.message.empty()) row["message"] = o.solve.message;
    if (!o.warnings.empty()) row["warnings"] = o.warnings;
    orders.push_back(std::move(row));
    timings.push_back({{"d", o.order},
                       {"assembly_seconds", o.assembly_seconds},
                       {"cpu_seconds", o.solve.solve_seconds},
                       {"iterations", o.solve.iterations}});
  }
  j["orders"] = std::move(orders);
  if (const auto b = r.final_bound()) {
    j["final_bound"] = *b;
  } else {
    j["final_bound"] = nullptr;
  }
  if (r.monte_carlo) {
    const auto& mc = *r.monte_carlo;
    j["monte_carlo"] = {{"worst_cost", mc.worst_cost},
                        {"argmax_initial", named_state(mc.argmax_initial, mc.state_names)},
                        {"trajectories", mc.trajectories},
                        {"violations", mc.violations},
                        {"diverged", mc.diverged}};
  } else {
    j["monte_carlo"] = nullptr;
  }
  j["monotone"] = r.monotone;
  j["verdict"] = to_string(r.verdict);
  if (r.violating_initial) {
    const std::vector<std::string> names =
        r.monte_carlo ? r.monte_carlo->state_names : std::vector<std::string>{};
    j["violating_initial"] = named_state(*r.violating_initial, names);
  }
  j["notes"] = r.notes;
  j["metadata"] = {{"generated_at", meta.generated_at},
                   {"tool_version", meta.tool_version},
                   {"backend", meta.backend},
                   {"preset", meta.preset},
                   {"timings", timings}};
  (void)vector_json;
  return j.dump(2) + "\n";
}

std::string report_table(const CertificationReport& r) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-3s %-14s %-14s %-10s %-13s %s\n", "d",
                "upper bound", "J (concave)", "cpu [s]", "status", "largest block");
  os << buf;
  for (const auto& o : r.orders) {
    if (o.solve.has_bound()) {
      std::snprintf(buf, sizeof buf, "%-3d %-14.5g %-14.5g %-10.3g %-13s %zu\n",
                    o.order, o.solve.bound, -o.solve.bound, o.solve.solve_seconds,
                    to_string(o.solve.status).c_str(), o.largest_block);
    } else {
      std::snprintf(buf, sizeof buf, "%-3d %-14s %-14s %-10.3g %-13s %zu\n", o.order,
                    "-", "-", o.solve.solve_seconds, to_string(o.solve.status).c_str(),
                    o.largest_block);
    }
    os << buf;
  }
  if (r.monte_carlo) {
    std::snprintf(buf, sizeof buf, "Monte-Carlo worst case: %.5g over %zu trajectories\n",
                  r.monte_carlo->worst_cost, r.monte_carlo->trajectories);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "threshold %.4g -> %s\n", r.threshold,
                to_string(r.verdict).c_str());
  os << buf;
  return os.str();
}

}  // namespace occuval::sdp
