#pragma once

#include "ewaldqft/charge_system.hpp"

#include <memory>
#include <vector>

namespace ewaldqft {

/// Bare Coulomb sum over periodic image cells n with |n_i| <= n_max (a cube
/// of cells, 3-d images for both d = 2 and d = 3), i = j excluded only at
/// n = 0. n_max = 0 is the plain in-cell pair sum.
double direct_sum_energy(const ChargeSystem& system, int n_max);

/// Lattice kernel G_s(delta) = sum over cells n on shell s (max |n_i| = s)
/// of 1 / |(delta + n M) h| for every grid displacement delta. Depends only
/// on (d, M, L, n_max), so one kernel serves every system on that grid. By
/// cubic symmetry G depends only on the sorted absolute components of delta.
class CoulombLatticeKernel {
public:
    CoulombLatticeKernel(int dim, int grid_size, double cell_length, int n_max);

    int dim() const { return dim_; }
    int grid_size() const { return grid_size_; }
    double cell_length() const { return length_; }
    int n_max() const { return n_max_; }

    /// Cumulative energies E(0), E(1), ..., E(n_max).
    std::vector<double> shell_energies(const ChargeSystem& system) const;

    /// Process-wide cache keyed by (d, M, L, n_max).
    static std::shared_ptr<const CoulombLatticeKernel> shared(int dim, int grid_size, double cell_length, int n_max);

private:
    std::size_t key(int a, int b, int c) const;

    int dim_;
    int grid_size_;
    double length_;
    int n_max_;
    std::vector<std::size_t> slot_; ///< sorted triple -> row in shells_
    std::size_t rows_ = 0;
    std::vector<double> shells_;    ///< [shell][row]
};

struct DirectSumOptions {
    int n_max = 32;          ///< must be a multiple of 8
    double tolerance = 1e-5; ///< relative agreement of successive extrapolants
};

struct DirectSumResult {
    double energy = 0.0;       ///< extrapolated shell-converged estimate
    double raw = 0.0;          ///< E(n_max) without extrapolation
    double rel_change = 0.0;   ///< |R(n_max) - R(n_max/2)| / |R(n_max)|
    bool converged = false;
    int n_max = 0;
    double tolerance = 0.0;
    std::vector<double> shell_energies;
};

/// Truncated cubic image sums converge to the eps' = 1 (vacuum-boundary)
/// lattice energy with error a/n^2 + b/n^3 + ... . Two Richardson levels on
/// (n/4, n/2, n) cancel both leading terms; convergence is declared when the
/// extrapolants at n and n/2 agree to `tolerance`.
DirectSumResult converged_direct_sum(const ChargeSystem& system, const DirectSumOptions& options = {});

/// Two-level Richardson extrapolant from E(m), E(2m), E(4m).
double richardson_extrapolate(double e_m, double e_2m, double e_4m);

} // namespace ewaldqft
