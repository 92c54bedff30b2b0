#include "erwlab/heat_kernel.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "erwlab/errors.hpp"
#include "erwlab/estimate.hpp"

namespace erwlab {

namespace {

int point_parity(LatticePoint p) {
    return static_cast<int>(((p.x + p.y) % 2 + 2) % 2);
}

void require_cap(int k, int cap) {
    if (k < 0) throw std::invalid_argument("negative step count");
    if (k > cap)
        throw ResourceLimit("dynamic-programming depth " + std::to_string(k) +
                            " exceeds cap " + std::to_string(cap));
}

}  // namespace

PackedLatticeTable::PackedLatticeTable(int radius, int parity)
    : radius_(radius), parity_(parity & 1) {
    if (radius < 0) throw std::invalid_argument("negative table radius");
    umax_ = (radius % 2 == parity_) ? radius : radius - 1;
    side_ = umax_ + 1;
    if (side_ > 0)
        cells_.assign(static_cast<std::size_t>(side_) * static_cast<std::size_t>(side_), 0.0);
    else
        side_ = 0;
}

bool PackedLatticeTable::contains(LatticePoint p) const {
    if (point_parity(p) != parity_) return false;
    const std::int64_t u = p.x + p.y;
    const std::int64_t v = p.x - p.y;
    return u >= -umax_ && u <= umax_ && v >= -umax_ && v <= umax_;
}

double PackedLatticeTable::value(LatticePoint p) const {
    if (!contains(p)) return 0.0;
    const std::int64_t u = p.x + p.y;
    const std::int64_t v = p.x - p.y;
    const auto iu = static_cast<std::size_t>((u + umax_) / 2);
    const auto iv = static_cast<std::size_t>((v + umax_) / 2);
    return cells_[iu * side_ + iv];
}

double PackedLatticeTable::total_mass() const {
    CompensatedSum s;
    for (double c : cells_) s.add(c);
    return s.value();
}

double PackedLatticeTable::max_value() const {
    double m = 0.0;
    for (double c : cells_) m = std::max(m, c);
    return m;
}

void PackedLatticeTable::add_scaled(const PackedLatticeTable& other, double scale) {
    if (other.parity_ != parity_)
        throw std::invalid_argument("parity mismatch in table accumulation");
    if (other.umax_ > umax_) throw std::invalid_argument("accumulated table does not fit");
    const int off = (umax_ - other.umax_) / 2;
    for (int iu = 0; iu < other.side_; ++iu) {
        const double* src = other.cells_.data() + static_cast<std::size_t>(iu) * other.side_;
        double* dst = cells_.data() + static_cast<std::size_t>(iu + off) * side_ + off;
        for (int iv = 0; iv < other.side_; ++iv) dst[iv] += scale * src[iv];
    }
}

KernelSweeper::KernelSweeper() : cur_(0, 0) {
    cur_.cell(0, 0) = 1.0;
}

void KernelSweeper::step() {
    // In (u,v) coordinates the four lattice steps move u and v by +-1
    // independently, so the new cell (iu,iv) collects the four old cells
    // (iu-1|iu, iv-1|iv); out-of-range reads are zero.
    const int os = cur_.side();
    next_ = PackedLatticeTable(k_ + 1, (k_ + 1) & 1);
    const int ns = next_.side();
    const double* old_cells = cur_.data();
    double* new_cells = next_.data();
    for (int iu = 0; iu < ns; ++iu) {
        double* dst = new_cells + static_cast<std::size_t>(iu) * ns;
        for (int r = iu - 1; r <= iu; ++r) {
            if (r < 0 || r >= os) continue;
            const double* src = old_cells + static_cast<std::size_t>(r) * os;
            dst[0] += src[0];
            for (int iv = 1; iv < os; ++iv) dst[iv] += src[iv - 1] + src[iv];
            dst[os] += src[os - 1];
        }
        for (int iv = 0; iv < ns; ++iv) dst[iv] *= 0.25;
    }
    std::swap(cur_, next_);
    ++k_;
}

HeatKernelTable heat_kernel(int k, int cap) {
    require_cap(k, cap);
    KernelSweeper sweeper;
    while (sweeper.k() < k) sweeper.step();
    return {k, sweeper.table()};
}

std::vector<double> heat_kernel_bound_sequence(int k_max, int cap) {
    if (k_max < 1) throw std::invalid_argument("k_max >= 1 required");
    require_cap(k_max, cap);
    std::vector<double> seq;
    seq.reserve(static_cast<std::size_t>(k_max));
    KernelSweeper sweeper;
    for (int k = 1; k <= k_max; ++k) {
        sweeper.step();
        seq.push_back(static_cast<double>(k) * sweeper.table().max_value());
    }
    return seq;
}

double heat_kernel_bound_constant(int k_max, int cap) {
    const auto seq = heat_kernel_bound_sequence(k_max, cap);
    return *std::max_element(seq.begin(), seq.end());
}

GreenFunctionTable::GreenFunctionTable(int n, PackedLatticeTable even_part,
                                       PackedLatticeTable odd_part)
    : n_(n), even_(std::move(even_part)), odd_(std::move(odd_part)) {}

double GreenFunctionTable::value(LatticePoint p) const {
    return point_parity(p) == 0 ? even_.value(p) : odd_.value(p);
}

double GreenFunctionTable::total_mass() const {
    return even_.total_mass() + odd_.total_mass();
}

double GreenFunctionTable::max_value() const {
    return std::max(even_.max_value(), odd_.max_value());
}

GreenFunctionTable green_function(int n, int cap) {
    require_cap(n, cap);
    PackedLatticeTable even(n, 0);
    PackedLatticeTable odd(n, 1);
    const int begin = (n + 1) / 2;
    KernelSweeper sweeper;
    if (begin == 0) even.add_scaled(sweeper.table(), 1.0);
    for (int k = 1; k <= n; ++k) {
        sweeper.step();
        if (k < begin) continue;
        if (k % 2 == 0)
            even.add_scaled(sweeper.table(), 1.0);
        else
            odd.add_scaled(sweeper.table(), 1.0);
    }
    return {n, std::move(even), std::move(odd)};
}

double kernel_green_overlap(const HeatKernelTable& kernel, const GreenFunctionTable& green,
                            LatticePoint x) {
    CompensatedSum s;
    kernel.values.for_each([&](LatticePoint y, double p) {
        if (p == 0.0) return;
        s.add(p * green.value({-y.x - x.x, -y.y - x.y}));
    });
    return s.value();
}

}  // namespace erwlab
