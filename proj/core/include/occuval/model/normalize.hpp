#pragma once

#include <unordered_map>

#include "occuval/model/system.hpp"

namespace occuval::model {

/// Affine rescaling x = a * xhat (per variable) and t = T * s. Variables keep
/// their identity; only the chart changes. Unlisted variables keep a = 1.
class Normalization {
 public:
  Normalization(std::unordered_map<poly::Var, double> half_widths,
                double horizon);

  double half_width(poly::Var v) const;
  double horizon() const { return horizon_; }

  /// p(x, t) rewritten in scaled coordinates: p(a * xhat, T * s).
  poly::Polynomial scale(const poly::Polynomial& p, poly::Var time) const;
  /// Inverse chart: p(xhat, s) rewritten in physical coordinates.
  poly::Polynomial unscale(const poly::Polynomial& p, poly::Var time) const;
  SemialgebraicSet scale(const SemialgebraicSet& s, poly::Var time) const;

  double to_scaled(poly::Var v, double physical) const {
    return physical / half_width(v);
  }
  double to_physical(poly::Var v, double scaled) const {
    return scaled * half_width(v);
  }

 private:
  std::unordered_map<poly::Var, double> half_widths_;
  double horizon_;
};

/// dxhat_i/ds = (T / a_i) f_i(a * xhat, T * s), guards rescaled alike.
PiecewiseSystem normalize_system(const PiecewiseSystem& sys,
                                 const Normalization& n);

}  // namespace occuval::model
