#pragma once

#include <cstdint>
#include <vector>

#include "erwlab/lattice.hpp"

namespace erwlab {

inline constexpr int kDefaultKernelCap = 4096;

// Nonnegative table on one parity class of the diamond |x|+|y| <= radius.
// Storage uses the rotated coordinates u = x+y, v = x-y: the diamond is the
// square max(|u|,|v|) <= radius, u and v always share the point's parity,
// and packing only the valid (u,v) pairs halves memory while making the
// off-parity zeros structural rather than stored.
class PackedLatticeTable {
public:
    PackedLatticeTable() = default;
    PackedLatticeTable(int radius, int parity);

    int radius() const { return radius_; }
    int parity() const { return parity_; }
    // Largest |u| (= |v|) actually representable; side() = umax()+1 indices.
    int umax() const { return umax_; }
    int side() const { return umax_ + 1; }

    bool contains(LatticePoint p) const;
    double value(LatticePoint p) const;  // 0 off-parity or out of range

    double& cell(int iu, int iv) { return cells_[static_cast<std::size_t>(iu) * side_ + iv]; }
    double cell(int iu, int iv) const { return cells_[static_cast<std::size_t>(iu) * side_ + iv]; }
    double* data() { return cells_.data(); }
    const double* data() const { return cells_.data(); }

    double total_mass() const;
    double max_value() const;

    // f(LatticePoint, double) over every stored cell.
    template <typename F>
    void for_each(F&& f) const {
        for (int iu = 0; iu < side_; ++iu) {
            const std::int64_t u = 2 * iu - umax_;
            for (int iv = 0; iv < side_; ++iv) {
                const std::int64_t v = 2 * iv - umax_;
                f(LatticePoint{(u + v) / 2, (u - v) / 2},
                  cells_[static_cast<std::size_t>(iu) * side_ + iv]);
            }
        }
    }

    // this += scale * other; other must have the same parity and fit inside.
    void add_scaled(const PackedLatticeTable& other, double scale);

private:
    int radius_ = 0;
    int parity_ = 0;
    int umax_ = -1;
    int side_ = 0;
    std::vector<double> cells_;
};

// Repeated convolution with the 4-point uniform step kernel. After k calls
// to step() the table is the exact k-step heat kernel of the plane simple
// random walk.
class KernelSweeper {
public:
    KernelSweeper();

    void step();
    int k() const { return k_; }
    const PackedLatticeTable& table() const { return cur_; }

private:
    PackedLatticeTable cur_;
    PackedLatticeTable next_;
    int k_ = 0;
};

struct HeatKernelTable {
    int k = 0;
    PackedLatticeTable values;
};

HeatKernelTable heat_kernel(int k, int cap = kDefaultKernelCap);

// k * max_y p_k(y) for k = 1..k_max (index 0 holds k = 1).
std::vector<double> heat_kernel_bound_sequence(int k_max, int cap = kDefaultKernelCap);

// Empirical constant: max over 1 <= k <= k_max of k * max_y p_k(y).
double heat_kernel_bound_constant(int k_max, int cap = kDefaultKernelCap);

// Pointwise sum of heat kernels over the step window [ceil(n/2), n].
class GreenFunctionTable {
public:
    GreenFunctionTable(int n, PackedLatticeTable even_part, PackedLatticeTable odd_part);

    int n() const { return n_; }
    int window_begin() const { return (n_ + 1) / 2; }
    int window_end() const { return n_; }
    int window_length() const { return window_end() - window_begin() + 1; }

    double value(LatticePoint p) const;
    double total_mass() const;
    double max_value() const;

    const PackedLatticeTable& parity_layer(int parity) const {
        return parity == 0 ? even_ : odd_;
    }

private:
    int n_;
    PackedLatticeTable even_;
    PackedLatticeTable odd_;
};

GreenFunctionTable green_function(int n, int cap = kDefaultKernelCap);

// sum_y p(y) * g(-y - x): expected window visits to -x of a walk restarted
// after the kernel's k steps. Uniform positivity of this overlap over
// ||x|| <= A*sqrt(n) is what drives the window-return lower bound.
double kernel_green_overlap(const HeatKernelTable& kernel, const GreenFunctionTable& green,
                            LatticePoint x);

}  // namespace erwlab
