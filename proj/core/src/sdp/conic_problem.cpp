#include "occuval/sdp/conic_problem.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <set>
#include <utility>

#include <Eigen/Eigenvalues>

namespace occuval::sdp {

std::string to_string(RowKind k) {
  switch (k) {
    case RowKind::kMass: return "mass";
    case RowKind::kLiouville: return "liouville";
    case RowKind::kMarginal: return "marginal";
    case RowKind::kPin: return "pin";
  }
  return "?";
}

void Fnv1a::bytes(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h_ ^= p[i];
    h_ *= 1099511628211ull;
  }
}

void Fnv1a::f64(double v) {
  if (v == 0.0) v = 0.0;  // fold -0
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  u64(bits);
}

void Fnv1a::str(std::string_view s) {
  u64(s.size());
  bytes(s.data(), s.size());
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Eigen::MatrixXd PsdBlock::evaluate(const Eigen::VectorXd& y) const {
  const auto n = static_cast<Eigen::Index>(side);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : entries) {
    double v = e.constant;
    for (const auto& t : e.terms) v += t.coeff * y(static_cast<Eigen::Index>(t.var));
    const auto r = static_cast<Eigen::Index>(e.row);
    const auto c = static_cast<Eigen::Index>(e.col);
    m(r, c) += v;
    if (r != c) m(c, r) += v;
  }
  return m;
}

void ConicProblem::validate() const {
  auto check_terms = [&](const std::vector<Term>& terms, const std::string& where) {
    for (const auto& t : terms) {
      if (t.var >= num_vars) {
        throw ProblemError(where + " references undeclared variable " +
                           std::to_string(t.var));
      }
      if (!std::isfinite(t.coeff)) {
        throw ProblemError(where + " has a non-finite coefficient");
      }
    }
  };
  if (!var_names.empty() && var_names.size() != num_vars) {
    throw ProblemError("variable name list does not match num_vars");
  }
  check_terms(objective, "objective");
  bool mass = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    check_terms(rows[i].terms, "row " + std::to_string(i));
    if (!std::isfinite(rows[i].rhs)) {
      throw ProblemError("row " + std::to_string(i) + " has a non-finite rhs");
    }
    mass = mass || rows[i].kind == RowKind::kMass;
  }
  if (!mass) throw ProblemError("problem has no mass row");
  for (const auto& b : blocks) {
    if (b.side == 0) throw ProblemError("block '" + b.label + "' is empty");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& e : b.entries) {
      if (e.row > e.col || e.col >= b.side) {
        throw ProblemError("block '" + b.label +
                           "' has an entry outside its upper triangle");
      }
      if (!seen.emplace(e.row, e.col).second) {
        throw ProblemError("block '" + b.label + "' repeats entry (" +
                           std::to_string(e.row) + "," + std::to_string(e.col) +
                           ")");
      }
      check_terms(e.terms, "block '" + b.label + "'");
    }
  }
}

std::uint64_t ConicProblem::hash() const {
  Fnv1a h;
  h.str("occuval.conic/1");
  h.u64(num_vars);
  auto terms = [&](const std::vector<Term>& ts) {
    h.u64(ts.size());
    for (const auto& t : ts) {
      h.u64(t.var);
      h.f64(t.coeff);
    }
  };
  terms(objective);
  h.f64(objective_constant);
  h.u64(rows.size());
  for (const auto& r : rows) {
    h.u64(static_cast<std::uint64_t>(r.kind));
    terms(r.terms);
    h.f64(r.rhs);
  }
  h.u64(blocks.size());
  for (const auto& b : blocks) {
    h.u64(b.side);
    h.u64(b.entries.size());
    for (const auto& e : b.entries) {
      h.u64(e.row);
      h.u64(e.col);
      h.f64(e.constant);
      terms(e.terms);
    }
  }
  return h.value();
}

double ConicProblem::objective_value(const Eigen::VectorXd& y) const {
  double v = objective_constant;
  for (const auto& t : objective) v += t.coeff * y(static_cast<Eigen::Index>(t.var));
  return v;
}

double ConicProblem::max_equality_residual(const Eigen::VectorXd& y) const {
  double worst = 0.0;
  for (const auto& r : rows) {
    double v = 0.0;
    for (const auto& t : r.terms) v += t.coeff * y(static_cast<Eigen::Index>(t.var));
    worst = std::max(worst, std::abs(v - r.rhs) / (1.0 + std::abs(r.rhs)));
  }
  return worst;
}

double ConicProblem::min_block_eigenvalue(const Eigen::VectorXd& y) const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& b : blocks) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.evaluate(y),
                                                      Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues()(0));
  }
  return lo;
}

std::size_t ConicProblem::largest_block_side() const {
  std::size_t s = 0;
  for (const auto& b : blocks) s = std::max(s, b.side);
  return s;
}

}  // namespace occuval::sdp
