#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "occuval/liouville/problem.hpp"
#include "occuval/poly/monomial_basis.hpp"
#include "occuval/sdp/conic_problem.hpp"

namespace occuval::liouville {

enum class MeasureRole { kInitial, kOccupation, kTerminal };
std::string to_string(MeasureRole r);

struct MeasureDecl {
  std::string name;
  MeasureRole role = MeasureRole::kOccupation;
  /// Ordered variables the measure sees; occupation clusters start with time.
  std::vector<poly::Var> cluster;
  /// Support over the cluster, box constraints included.
  model::SemialgebraicSet support;
  std::string subsystem;
  /// Cell index for occupation measures.
  std::optional<std::size_t> cell;
};

/// Moment variables y_alpha (|alpha| <= 2d) of one measure, stored at
/// consecutive indices starting at `offset` in graded-lex order.
class MomentSpace {
 public:
  MomentSpace(MeasureDecl decl, int order, std::size_t offset);

  const MeasureDecl& decl() const { return decl_; }
  const std::string& name() const { return decl_.name; }
  int order() const { return order_; }
  const poly::MonomialBasis& moments() const { return moments_; }
  std::size_t offset() const { return offset_; }
  std::size_t size() const { return moments_.size(); }

  /// Global variable index of y_alpha; throws AssemblyError if alpha is not
  /// a declared moment.
  std::size_t var(const poly::Exponents& alpha) const;
  std::size_t var(const poly::Monomial& m) const;
  /// Dense exponents of `m` in cluster order; throws on foreign variables.
  poly::Exponents exponents(const poly::Monomial& m) const;

  /// <mu, p> as a linear form in the moment variables. Throws AssemblyError
  /// if p leaves the cluster or exceeds degree 2d.
  std::vector<sdp::Term> integrate(const poly::Polynomial& p) const;

 private:
  MeasureDecl decl_;
  int order_;
  std::size_t offset_;
  poly::MonomialBasis moments_;
};

/// M_d(y)[a, b] = y_{a + b} over the basis of degree <= d.
sdp::PsdBlock moment_matrix(const MomentSpace& mu, int d);

/// M_{d - ceil(deg g / 2)}(g y)[a, b] = sum_c g_c y_{a + b + c}. Returns
/// nullopt when deg g > 2d (the constraint cannot be represented).
std::optional<sdp::PsdBlock> localizing_matrix(const MomentSpace& mu,
                                               const poly::Polynomial& g,
                                               int d);

}  // namespace occuval::liouville
