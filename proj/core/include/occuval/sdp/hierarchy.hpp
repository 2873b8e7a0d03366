#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "occuval/liouville/relaxation.hpp"
#include "occuval/sdp/solver.hpp"

namespace occuval::sdp {

enum class Verdict { kCertified, kNotCertified, kInconclusive };
std::string to_string(Verdict v);

/// A relaxation bound below a simulated cost: the relaxation is wrong.
class SandwichError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline constexpr double kSandwichTolerance = 1e-6;
inline constexpr double kMonotoneTolerance = 1e-6;

/// certified iff bound <= threshold, not-certified iff mc_value > threshold,
/// inconclusive otherwise. Throws SandwichError if bound < mc_value - 1e-6.
Verdict verdict(double bound, double mc_value, double threshold);

struct OrderResult {
  int order = 0;
  SolveResult solve;
  std::size_t num_vars = 0;
  std::size_t num_rows = 0;
  std::size_t num_blocks = 0;
  std::size_t largest_block = 0;
  double assembly_seconds = 0.0;
  std::string problem_hash;
  std::vector<std::string> warnings;
};

/// Lower side of the sandwich, taken from a Monte-Carlo sweep.
struct MonteCarloSummary {
  double worst_cost = 0.0;
  Eigen::VectorXd argmax_initial;
  std::vector<std::string> state_names;
  std::size_t trajectories = 0;
  std::size_t violations = 0;
  std::size_t diverged = 0;
};

struct HierarchyOptions {
  std::vector<int> orders;
  liouville::RelaxationOptions relaxation;
  SolverOptions solver;
  double threshold = 0.003;
  /// Called after each order is assembled (export hooks).
  std::function<void(const liouville::MomentRelaxation&)> on_assembled;
  /// Called after each order is solved (progress output).
  std::function<void(const OrderResult&)> on_solved;
};

struct CertificationReport {
  std::string label;
  std::string config_hash;
  bool sparse = false;
  liouville::TimeChart chart = liouville::TimeChart::kUnit;
  double threshold = 0.003;
  std::vector<OrderResult> orders;
  std::optional<MonteCarloSummary> monte_carlo;
  bool monotone = true;
  Verdict verdict = Verdict::kInconclusive;
  /// Attached when not certified and the sweep exceeded the threshold.
  std::optional<Eigen::VectorXd> violating_initial;
  std::vector<std::string> notes;

  /// Bound of the highest solved order.
  std::optional<double> final_bound() const;
};

/// Assembles and solves every order in turn, audits monotonicity and the
/// sandwich against `mc`, and issues the verdict. Solver failures are
/// recorded and skipped; a sandwich violation throws SandwichError.
CertificationReport run_hierarchy(const liouville::ValidationProblem& prob,
                                  const HierarchyOptions& opts,
                                  const std::optional<MonteCarloSummary>& mc);

struct ReportMetadata {
  std::string generated_at;
  std::string tool_version;
  std::string backend;
  std::string preset;
};

inline constexpr const char* kReportSchema = "occuval.certification/1";

/// Schema-versioned JSON. Everything run-dependent (timestamps, timings)
/// lives under "metadata" so repeated runs differ only there.
std::string report_json(const CertificationReport& r, const ReportMetadata& meta);

/// Text table: one row per order with bound, concave value and time.
std::string report_table(const CertificationReport& r);

}  // namespace occuval::sdp
