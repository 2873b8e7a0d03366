#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace occuval::sdp {

class ProblemError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Term {
  std::size_t var = 0;
  double coeff = 0.0;
};

enum class RowKind { kMass, kLiouville, kMarginal, kPin };
std::string to_string(RowKind k);

/// sum(coeff * y[var]) == rhs
struct EqualityRow {
  std::vector<Term> terms;
  double rhs = 0.0;
  RowKind kind = RowKind::kLiouville;
  std::string label;
};

/// Upper-triangular entry (row <= col) of a symmetric block:
/// constant + sum(coeff * y[var]), mirrored to (col, row).
struct BlockEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  std::vector<Term> terms;
  double constant = 0.0;
};

/// Linear matrix inequality M(y) >= 0 (positive semidefinite).
struct PsdBlock {
  std::string label;
  std::size_t side = 0;
  std::vector<BlockEntry> entries;

  Eigen::MatrixXd evaluate(const Eigen::VectorXd& y) const;
};

/// maximize objective(y) over y subject to equality rows and PSD blocks.
struct ConicProblem {
  std::size_t num_vars = 0;
  std::vector<std::string> var_names;
  std::vector<Term> objective;
  double objective_constant = 0.0;
  std::vector<EqualityRow> rows;
  std::vector<PsdBlock> blocks;

  /// Throws ProblemError on undeclared variables, lower-triangular or
  /// out-of-range entries, duplicates, or a missing mass row.
  void validate() const;
  /// FNV-1a over a canonical byte serialization.
  std::uint64_t hash() const;

  double objective_value(const Eigen::VectorXd& y) const;
  /// Largest |row(y) - rhs| / (1 + |rhs|).
  double max_equality_residual(const Eigen::VectorXd& y) const;
  /// Smallest eigenvalue over all blocks (+inf without blocks).
  double min_block_eigenvalue(const Eigen::VectorXd& y) const;
  std::size_t largest_block_side() const;
};

/// 64-bit FNV-1a, exposed for other content hashes.
class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n);
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void f64(double v);
  void str(std::string_view s);
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 1469598103934665603ull;
};

std::string hex64(std::uint64_t v);

}  // namespace occuval::sdp
