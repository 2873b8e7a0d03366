#include "occuval/sim/plot_data.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace occuval::sim {

std::vector<std::filesystem::path> emit_plot_data(
    const std::vector<Trajectory>& trajectories,
    const std::optional<Trajectory>& reference,
    const std::vector<std::string>& channels,
    const std::filesystem::path& dir) {
  const Trajectory* grid = nullptr;
  if (reference) grid = &*reference;
  else if (!trajectories.empty()) grid = &trajectories.front();
  if (grid) {
    for (const auto& t : trajectories) {
      if (t.times.size() != grid->times.size()) {
        throw std::invalid_argument("trajectories do not share a time grid");
      }
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("I/O error: cannot create " + dir.string() + ": " +
                             ec.message());
  }

  std::vector<std::filesystem::path> written;
  for (std::size_t ch = 0; ch < channels.size(); ++ch) {
    const auto path = dir / (channels[ch] + ".csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("I/O error: cannot write " + path.string());
    out << std::setprecision(15);
    out << "t";
    if (reference) out << ",ref";
    for (std::size_t k = 0; k < trajectories.size(); ++k) out << ",traj_" << k;
    out << "\n";
    const auto idx = static_cast<Eigen::Index>(ch);
    if (grid) {
      for (std::size_t i = 0; i < grid->times.size(); ++i) {
        out << grid->times[i];
        if (reference) out << "," << reference->states[i](idx);
        for (const auto& t : trajectories) out << "," << t.states[i](idx);
        out << "\n";
      }
    }
    if (!out) throw std::runtime_error("I/O error: write failed for " + path.string());
    written.push_back(path);
  }
  return written;
}

}  // namespace occuval::sim
