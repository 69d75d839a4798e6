#pragma once

#include "ewaldqft/charge_system.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace ewaldqft {

// Reduced units throughout: 1/(4 pi eps0) = 1, energies in q^2/length.

enum class RealSpaceSum {
    ImageShells,  ///< every periodic image with |r_ij + nL| <= r_c
    MinimumImage, ///< nearest image only; requires r_c <= L/2
};

struct EwaldParams {
    double sigma = 0.3;       ///< Gaussian splitting width
    double real_cutoff = 2.2; ///< r_c
    int kspace_cutoff = 8;    ///< k_max, bound on the infinity norm of integer wavevectors m
    int image_shells = 32;    ///< n_max for the direct-sum oracle
    double eps_prime = 1.0;   ///< boundary dielectric; infinity means tinfoil
    RealSpaceSum real_space = RealSpaceSum::ImageShells;

    static constexpr double tinfoil = std::numeric_limits<double>::infinity();
};

/// sigma0 = max(0.3 L, 1.35 L / k_max), r_c = 5 sqrt(2) sigma0, k_max = M/2,
/// eps' = 1. The Gaussian is <= e^-36 on the k-cube face and erfc(5) ~ 1.5e-12
/// at the real-space cutoff.
EwaldParams default_params(int grid_size, double cell_length);

/// Same cutoffs, different sigma; used by sigma sweeps.
EwaldParams with_sigma(EwaldParams params, double sigma);

/// Throws ValidationError when an EwaldParams invariant does not hold for
/// this system.
void check_params(const EwaldParams& params, const ChargeSystem& system);

enum class Backend { DirectK, GridFFT, QuantumExact, QuantumSampled };

std::string to_string(Backend backend);
Backend parse_backend(const std::string& text);

struct EnergyBreakdown {
    double e_short = 0.0;
    double e_long = 0.0;
    double e_self = 0.0;
    double e_dip = 0.0;
    double e_total = 0.0; ///< always e_short + e_long + e_self + e_dip as stored
    Backend backend = Backend::GridFFT;
    double sigma = 0.0;
    double real_cutoff = 0.0;
    int kspace_cutoff = 0;
    std::uint64_t shots = 0; ///< K for QuantumSampled, else 0
    std::uint64_t seed = 0;
    std::int64_t wall_ns = 0;
};

/// Shot settings for the quantum backends; ignored by the classical ones.
struct SamplingOptions {
    std::uint64_t shots = 100000;
    std::uint64_t seed = 1;
};

double real_space_energy(const ChargeSystem& system, const EwaldParams& params);
double self_energy(const ChargeSystem& system, const EwaldParams& params);
double dipole_energy(const ChargeSystem& system, const EwaldParams& params);

/// E^L with S(k) evaluated directly, O(N) per wavevector.
double reciprocal_energy_direct(const ChargeSystem& system, const EwaldParams& params);

/// E^L from an FFT of the exactly-assigned M^d charge grid.
double reciprocal_energy_fft(const ChargeSystem& system, const EwaldParams& params);

/// Weight W(s) for every grid index s (row-major, axis 0 most significant):
/// sum over integer m != 0 that folds to s and lies within the k_max cube
/// of exp(-sigma^2 k^2 / 2) / k^2, k = 2 pi m / L. For d = 2 the sum also
/// runs over m_z in [-k_max, k_max]. Shared by the grid and quantum backends.
std::vector<double> reciprocal_weight_table(int dim, int grid_size, double cell_length, const EwaldParams& params);

/// Signed wavevector component for grid index s: s if s <= M/2 else s - M.
inline int fold_index(int s, int grid_size) { return s <= grid_size / 2 ? s : s - grid_size; }

EnergyBreakdown total_energy(const ChargeSystem& system, const EwaldParams& params, Backend backend,
                             const SamplingOptions& sampling = {});

/// `# schema-version: 1` line plus the column header of energy_csv_row.
std::string energy_csv_header();
/// N,d,M,sigma,backend,e_short,e_long,e_self,e_dip,e_total,wall_ns,K
std::string energy_csv_row(const ChargeSystem& system, const EnergyBreakdown& energy);

} // namespace ewaldqft
