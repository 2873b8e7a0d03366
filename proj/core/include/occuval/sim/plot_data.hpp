#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "occuval/sim/integrate.hpp"

namespace occuval::sim {

/// Writes <dir>/<channel>.csv for every channel with columns
/// t[,ref],traj_0,...,traj_{n-1}. All trajectories (and the reference) must
/// share one time grid. `channels[k]` names state k of the trajectories; the
/// reference contributes its state k to file k. Returns the written paths.
std::vector<std::filesystem::path> emit_plot_data(
    const std::vector<Trajectory>& trajectories,
    const std::optional<Trajectory>& reference,
    const std::vector<std::string>& channels,
    const std::filesystem::path& dir);

}  // namespace occuval::sim
