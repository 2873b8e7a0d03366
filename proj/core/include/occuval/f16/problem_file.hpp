#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "occuval/f16/dutch_roll.hpp"
#include "occuval/sim/integrate.hpp"

namespace occuval::f16 {

inline constexpr const char* kProblemSchema = "occuval.problem/1";

/// Everything an F-16 style run needs, loaded from a schema-versioned JSON
/// file. Per-state vectors follow StateVars order:
/// beta phi p r W beta_r phi_r p_r r_r.
struct ProblemFile {
  std::string name = "f16-dutch-roll";
  PlantMatrices plant = PlantMatrices::f16();
  GainSet gains = GainSet::f16();
  UncertaintyModel uncertainty;
  std::array<double, 2> lambda{1.0, 0.2};
  double phi_max_nominal = 1.0;
  double phi_max_degraded = 0.314159;
  Eigen::Vector2d command{0.0, 0.17453292519943295};
  double horizon = 10.0;
  int sigmoid_degree = 3;
  ErrorModel mrac_error_model = ErrorModel::kSteadyState;
  /// X0 half-widths around the origin.
  std::vector<double> initial_half_width;
  /// X half-widths (containment during Monte-Carlo).
  std::vector<double> state_half_width;
  /// Scaling x = a * xhat used by the relaxation.
  std::vector<double> normalization;
  double threshold = 0.003;
  std::vector<std::size_t> grid{5, 5, 5, 5};
  double dt = 0.001;
  sim::Method method = sim::Method::kRk4;
  std::array<int, 2> lqr_orders{1, 4};
  std::array<int, 2> mrac_orders{1, 3};

  void validate() const;
  /// Resolves "nominal", "degraded" or a number in radians.
  double phi_max(const std::string& preset) const;
};

/// The shipped defaults (also written to data/f16-dutchroll.json).
ProblemFile default_problem();

ProblemFile load_problem(const std::filesystem::path& path);
ProblemFile parse_problem(const std::string& json_text);
std::string problem_to_json(const ProblemFile& p);
void save_problem(const ProblemFile& p, const std::filesystem::path& path);

}  // namespace occuval::f16
