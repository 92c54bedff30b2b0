#include "erwlab/trajectory_io.hpp"

#include <cstring>
#include <fstream>
#include <ostream>

#include "erwlab/errors.hpp"

namespace erwlab {

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
    unsigned char buf[sizeof(T)];
    in.read(reinterpret_cast<char*>(buf), sizeof(T));
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

}  // namespace

void write_trajectory(std::ostream& out, const Trajectory& traj, double alpha) {
    out.write(kTrajectoryMagic, 4);
    put_le(out, kTrajectoryVersion);
    put_le(out, alpha);
    put_le(out, static_cast<std::uint64_t>(traj.length()));
    const auto& steps = traj.steps();
    unsigned char packed = 0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        packed |= static_cast<unsigned char>(direction_index(steps[i]) << (2 * (i & 3)));
        if ((i & 3) == 3) {
            out.put(static_cast<char>(packed));
            packed = 0;
        }
    }
    if (!steps.empty() && (steps.size() & 3) != 0) out.put(static_cast<char>(packed));
    if (!out) throw IoError("trajectory write failed");
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj, double alpha) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string());
    write_trajectory(out, traj, alpha);
}

LoadedTrajectory read_trajectory(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kTrajectoryMagic, 4) != 0)
        throw IoError("not a trajectory file (bad magic)");
    const auto version = get_le<std::uint32_t>(in);
    if (version != kTrajectoryVersion)
        throw IoError("unsupported trajectory version " + std::to_string(version));
    const double alpha = get_le<double>(in);
    const auto n = get_le<std::uint64_t>(in);
    std::vector<Direction> steps;
    steps.reserve(n);
    unsigned char packed = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        if ((i & 3) == 0) {
            int c = in.get();
            if (c == EOF) throw IoError("truncated trajectory file");
            packed = static_cast<unsigned char>(c);
        }
        steps.push_back(static_cast<Direction>((packed >> (2 * (i & 3))) & 3));
    }
    return {Trajectory(std::move(steps)), alpha};
}

LoadedTrajectory read_trajectory(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_trajectory(in);
}

void write_counts_csv(std::ostream& out, const Trajectory& traj, std::int64_t stride) {
    if (stride < 1) stride = 1;
    out << "k,x,y,n1,n2,n3,n4\n";
    LatticePoint p = traj.origin();
    DirectionCounts c;
    const auto& steps = traj.steps();
    const auto emit = [&](std::int64_t k) {
        out << k << ',' << p.x << ',' << p.y << ',' << c.raw(0) << ',' << c.raw(1) << ','
            << c.raw(2) << ',' << c.raw(3) << '\n';
    };
    emit(0);
    for (std::size_t i = 0; i < steps.size(); ++i) {
        p.move(steps[i]);
        c.add(steps[i]);
        const auto k = static_cast<std::int64_t>(i + 1);
        if (k % stride == 0 || i + 1 == steps.size()) emit(k);
    }
}

}  // namespace erwlab
