#pragma once

#include <filesystem>
#include <string>

#include "occuval/liouville/relaxation.hpp"

namespace occuval::liouville {

inline constexpr const char* kRelaxationSchema = "occuval.relaxation/1";

/// Self-describing JSON: measures with their clusters and supports, variables
/// keyed by (measure, exponents), rows, blocks and the objective. Carries the
/// content hash of the conic problem.
std::string relaxation_json(const MomentRelaxation& r);

/// Sparse SDPA text of the same problem, in the form
///   minimize c'y  s.t.  sum_i F_i y_i - F_0 >= 0
/// with c = -objective, equality rows as pairs of diagonal (LP) entries and
/// PSD blocks after the LP block.
std::string sdpa_text(const sdp::ConicProblem& p);

void write_relaxation_json(const MomentRelaxation& r,
                           const std::filesystem::path& path);
void write_sdpa(const sdp::ConicProblem& p, const std::filesystem::path& path);

}  // namespace occuval::liouville
