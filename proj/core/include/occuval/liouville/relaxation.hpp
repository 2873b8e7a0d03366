#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "occuval/liouville/moments.hpp"
#include "occuval/liouville/problem.hpp"
#include "occuval/sdp/conic_problem.hpp"

namespace occuval::liouville {

/// Time coordinate of the relaxation: the normalized s in [0, 1] itself, or
/// sigma = 2 s - 1 in [-1, 1]. The second keeps the time marginal's moment
/// matrix far better conditioned (Legendre-like rather than Hilbert).
enum class TimeChart { kUnit, kSymmetric };
std::string to_string(TimeChart c);

struct RelaxationOptions {
  bool sparse = false;
  TimeChart chart = TimeChart::kUnit;
};

/// Time endpoints of the chart: {0, 1} or {-1, 1}.
std::pair<double, double> chart_interval(TimeChart c);

/// The system rewritten in the chart's time (identity for kUnit).
model::PiecewiseSystem to_chart(const model::PiecewiseSystem& sys, TimeChart c);

struct BlockSummary {
  std::string measure;
  std::size_t cluster_size = 0;
  std::size_t moment_side = 0;
  std::size_t localizing_blocks = 0;
  std::size_t moments = 0;
};

/// The three measures of one subsystem's Liouville equation.
struct SubsystemMeasures {
  std::size_t initial = 0;
  std::vector<std::size_t> occupation;  // one per cell
  std::size_t terminal = 0;
};

struct MomentRelaxation {
  int order = 0;
  bool sparse = false;
  TimeChart chart = TimeChart::kUnit;
  std::vector<MomentSpace> measures;
  SubsystemMeasures plant;
  std::optional<SubsystemMeasures> reference;
  sdp::ConicProblem problem;
  std::vector<BlockSummary> summary;
  std::vector<std::string> warnings;

  const MomentSpace& measure(std::string_view name) const;
  std::size_t largest_block_side() const { return problem.largest_block_side(); }
};

/// Measures of `sub` at order d, appended to `out` starting at variable
/// `offset`. Returns the new offset.
std::size_t declare_measures(const Subsystem& sub, const std::string& prefix,
                             const model::SemialgebraicSet& input_set, int d,
                             std::size_t offset, std::vector<MomentSpace>& out,
                             SubsystemMeasures& ids,
                             TimeChart chart = TimeChart::kUnit);

/// Test monomials v(s, x) for the Liouville rows at order d: degree
/// <= 2d + 1, x-degree <= 2d and deg(L_j v) <= 2d in every cell.
std::vector<poly::Polynomial> liouville_test_functions(
    const model::PiecewiseSystem& sys, int d);

/// <mu_T, v(1, .)> - <mu_0, v(0, .)> - sum_j <mu_j, dv/ds + grad v . f_j> = 0
/// for every test function. With the symmetric chart `sys` must already be
/// in sigma time and the initial slice is sigma = -1.
std::vector<sdp::EqualityRow> liouville_rows(
    const model::PiecewiseSystem& sys, int d,
    const std::vector<MomentSpace>& measures, const SubsystemMeasures& ids,
    TimeChart chart = TimeChart::kUnit);

/// sum_j <mu_j, m(s, w)> - sum_k <nu_k, m(s, E(x_r))> = 0 for every monomial
/// m in (s, w) of degree <= 2d.
std::vector<sdp::EqualityRow> marginal_rows(
    const std::vector<MomentSpace>& measures, const SubsystemMeasures& plant,
    const SubsystemMeasures& reference, poly::Var plant_time,
    poly::Var reference_time, const std::vector<poly::Var>& coupled,
    const poly::PolyVector& output_map, int d);

/// Smallest admissible order for `prob`.
int minimum_order(const ValidationProblem& prob);

/// Builds the order-d moment relaxation. With sparse = false a split problem
/// is first merged into one joint system.
MomentRelaxation assemble_relaxation(const ValidationProblem& prob, int d,
                                     const RelaxationOptions& opts);
MomentRelaxation assemble_relaxation(const ValidationProblem& prob, int d,
                                     bool sparse);

}  // namespace occuval::liouville
