#pragma once

#include <filesystem>
#include <iosfwd>

#include "erwlab/walk.hpp"

namespace erwlab {

// Binary trajectory format, little-endian:
//   magic "ERWT" | u32 version | f64 alpha | u64 step count | 2-bit codes
// Step i occupies bits 2*(i%4) .. 2*(i%4)+1 of byte i/4.
inline constexpr char kTrajectoryMagic[4] = {'E', 'R', 'W', 'T'};
inline constexpr std::uint32_t kTrajectoryVersion = 1;

void write_trajectory(std::ostream& out, const Trajectory& traj, double alpha);
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj, double alpha);

struct LoadedTrajectory {
    Trajectory trajectory;
    double alpha = 0.0;
};

LoadedTrajectory read_trajectory(std::istream& in);
LoadedTrajectory read_trajectory(const std::filesystem::path& path);

// CSV rows (k, x, y, N_1..N_4) for k = 0..length, every `stride` steps
// (last row always included).
void write_counts_csv(std::ostream& out, const Trajectory& traj, std::int64_t stride = 1);

}  // namespace erwlab
