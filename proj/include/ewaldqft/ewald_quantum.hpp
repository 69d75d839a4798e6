#pragma once

#include "ewaldqft/charge_system.hpp"
#include "ewaldqft/ewald.hpp"
#include "ewaldqft/qsim.hpp"

#include <cstdint>
#include <vector>

namespace ewaldqft {

/// Grid point <-> basis index. Axis 0 is the most significant block of
/// log2 M qubits and each coordinate is big-endian inside its block, so the
/// index is the row-major site number x_0 M^(d-1) + ... + x_{d-1}.
class EncodingMap {
public:
    EncodingMap(int dim, int grid_size);
    explicit EncodingMap(const ChargeSystem& system) : EncodingMap(system.dim(), system.grid_size()) {}

    int dim() const { return dim_; }
    int grid_size() const { return grid_size_; }
    int bits_per_axis() const { return bits_; }
    int n_qubits() const { return dim_ * bits_; }
    std::uint64_t size() const { return std::uint64_t{1} << n_qubits(); }

    std::uint64_t encode(const GridPoint& x) const;
    GridPoint decode(std::uint64_t index) const;

private:
    int dim_;
    int grid_size_;
    int bits_;
};

/// |psi> = sum_j (q_j / ||q||) |x_j>.
qsim::Statevector encode_charges(const ChargeSystem& system);

/// |amplitude|^2 after the d-dimensional QFT of the encoded state, indexed by
/// grid index s. M^d ||q||^2 p_s = |S(k_m)|^2 with m = fold(s).
std::vector<double> probabilities_exact(const ChargeSystem& system);

enum class EstimateMode { Exact, Sampled };

struct ReciprocalEstimate {
    double e_long = 0.0;
    EstimateMode mode = EstimateMode::Exact;
    std::uint64_t shots = 0; ///< 0 in exact mode
    std::uint64_t seed = 0;
    std::vector<double> contributions; ///< per grid index, filled on request
};

/// (2 pi / V) M^d ||q||^2 sum_s W(s) p_s for an arbitrary weight table.
double weighted_estimate(const ChargeSystem& system, std::span<const double> weights, std::span<const double> p);

/// Same functional applied to shot counts, p_s = c_s / K.
double weighted_estimate(const ChargeSystem& system, std::span<const double> weights,
                         const qsim::ShotHistogram& histogram);

ReciprocalEstimate estimate_reciprocal_energy(const ChargeSystem& system, const EwaldParams& params,
                                              EstimateMode mode, std::uint64_t shots = 100000,
                                              std::uint64_t seed = 1, bool keep_contributions = false);

struct BiasReport {
    double exact = 0.0;
    double mean = 0.0;
    double bias = 0.0;           ///< mean - exact
    double standard_error = 0.0; ///< sample sd / sqrt(#seeds)
    double sample_variance = 0.0;
    double predicted_variance = 0.0; ///< multinomial Var of one K-shot estimate
    std::size_t seeds = 0;
    std::uint64_t shots = 0;
    /// |bias| <= 3 SE, or |bias| within floating noise when SE is 0.
    bool within_three_se = false;
};

/// Repeats the sampled estimate over `seeds` and compares with the exact one.
/// An empty weight span uses reciprocal_weight_table(params).
BiasReport estimator_bias_check(const ChargeSystem& system, const EwaldParams& params, std::uint64_t shots,
                                std::span<const std::uint64_t> seeds, std::span<const double> weights = {});

} // namespace ewaldqft
