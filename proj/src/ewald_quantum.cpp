#include "ewaldqft/ewald_quantum.hpp"

#include "ewaldqft/errors.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace ewaldqft {

EncodingMap::EncodingMap(int dim, int grid_size) : dim_(dim), grid_size_(grid_size), bits_(0)
{
    if (dim != 2 && dim != 3) throw ValidationError("dimension must be 2 or 3");
    if (grid_size < 2 || !std::has_single_bit(static_cast<unsigned>(grid_size)))
        throw CapabilityError("quantum encoding needs a power-of-2 grid size >= 2");
    bits_ = std::countr_zero(static_cast<unsigned>(grid_size));
}

std::uint64_t EncodingMap::encode(const GridPoint& x) const
{
    std::uint64_t index = 0;
    for (int a = 0; a < dim_; ++a) {
        if (x[a] < 0 || x[a] >= grid_size_) throw ValidationError("grid point outside the encoding range");
        index = (index << bits_) | static_cast<std::uint64_t>(x[a]);
    }
    return index;
}

GridPoint EncodingMap::decode(std::uint64_t index) const
{
    if (index >= size()) throw ValidationError("basis index outside the encoding range");
    GridPoint x;
    const std::uint64_t mask = static_cast<std::uint64_t>(grid_size_) - 1;
    for (int a = dim_ - 1; a >= 0; --a) {
        x[a] = static_cast<int>(index & mask);
        index >>= bits_;
    }
    return x;
}

qsim::Statevector encode_charges(const ChargeSystem& system)
{
    const EncodingMap map(system);
    const double norm = system.charge_norm();
    std::vector<qsim::SparseEntry> entries;
    entries.reserve(system.size());
    for (const auto& c : system.charges()) entries.push_back({map.encode(c.x), qsim::Amplitude{c.q / norm, 0.0}});
    // Norm is 1 up to rounding of q_j / ||q||; renormalize to absorb it.
    return qsim::inject_sparse_state(map.n_qubits(), entries, /*normalize=*/true);
}

std::vector<double> probabilities_exact(const ChargeSystem& system)
{
    auto state = encode_charges(system);
    qsim::apply_qft_multidim(state, system.dim(), system.bits_per_axis());
    return state.probabilities();
}

namespace {

double prefactor(const ChargeSystem& system)
{
    const double sites = std::pow(static_cast<double>(system.grid_size()), system.dim());
    return 2.0 * std::numbers::pi / system.volume() * sites * system.sum_q2();
}

} // namespace

double weighted_estimate(const ChargeSystem& system, std::span<const double> weights, std::span<const double> p)
{
    if (weights.size() != p.size()) throw ValidationError("weight table and distribution sizes differ");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += weights[i] * p[i];
    return prefactor(system) * s;
}

double weighted_estimate(const ChargeSystem& system, std::span<const double> weights,
                         const qsim::ShotHistogram& histogram)
{
    if (histogram.shots == 0) throw ValidationError("histogram has no shots");
    double s = 0.0;
    for (const auto& [index, count] : histogram.counts) {
        if (index >= weights.size()) throw ValidationError("histogram index outside the weight table");
        s += weights[index] * static_cast<double>(count);
    }
    return prefactor(system) * s / static_cast<double>(histogram.shots);
}

ReciprocalEstimate estimate_reciprocal_energy(const ChargeSystem& system, const EwaldParams& params,
                                              EstimateMode mode, std::uint64_t shots, std::uint64_t seed,
                                              bool keep_contributions)
{
    check_params(params, system);
    if (2 * params.kspace_cutoff > system.grid_size())
        throw CapabilityError("quantum backend cannot represent k_max > M/2");
    if (mode == EstimateMode::Sampled && shots == 0) throw ValidationError("sampled mode needs K >= 1 shots");

    const auto weights = reciprocal_weight_table(system.dim(), system.grid_size(), system.cell_length(), params);
    auto state = encode_charges(system);
    qsim::apply_qft_multidim(state, system.dim(), system.bits_per_axis());

    ReciprocalEstimate est;
    est.mode = mode;
    std::vector<double> p;
    if (mode == EstimateMode::Exact) {
        p = state.probabilities();
    } else {
        est.shots = shots;
        est.seed = seed;
        const auto hist = qsim::sample_shots(state, shots, seed);
        p.assign(weights.size(), 0.0);
        for (const auto& [index, count] : hist.counts)
            p[index] = static_cast<double>(count) / static_cast<double>(shots);
    }
    est.e_long = weighted_estimate(system, weights, p);
    if (keep_contributions) {
        const double c = prefactor(system);
        est.contributions.resize(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) est.contributions[i] = c * weights[i] * p[i];
    }
    return est;
}

BiasReport estimator_bias_check(const ChargeSystem& system, const EwaldParams& params, std::uint64_t shots,
                                std::span<const std::uint64_t> seeds, std::span<const double> weights)
{
    if (shots == 0 || seeds.size() < 2) throw ValidationError("bias check needs K >= 1 and at least two seeds");
    std::vector<double> table;
    if (weights.empty()) {
        check_params(params, system);
        table = reciprocal_weight_table(system.dim(), system.grid_size(), system.cell_length(), params);
        weights = table;
    }
    auto state = encode_charges(system);
    qsim::apply_qft_multidim(state, system.dim(), system.bits_per_axis());
    const auto p = state.probabilities();

    BiasReport r;
    r.seeds = seeds.size();
    r.shots = shots;
    r.exact = weighted_estimate(system, weights, p);

    std::vector<double> samples;
    samples.reserve(seeds.size());
    for (auto seed : seeds) samples.push_back(weighted_estimate(system, weights, qsim::sample_shots(state, shots, seed)));
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(samples.size());
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    r.mean = mean;
    r.bias = mean - r.exact;
    r.sample_variance = ss / static_cast<double>(samples.size() - 1);
    r.standard_error = std::sqrt(r.sample_variance / static_cast<double>(samples.size()));

    // Var[c/K . w] for a multinomial: (sum w^2 p - (sum w p)^2) / K, times prefactor^2.
    const double c = prefactor(system);
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        m1 += weights[i] * p[i];
        m2 += weights[i] * weights[i] * p[i];
    }
    r.predicted_variance = c * c * std::max(0.0, m2 - m1 * m1) / static_cast<double>(shots);

    const double noise = 1e-12 * std::max(std::abs(r.exact), 1e-300);
    r.within_three_se = std::abs(r.bias) <= 3.0 * r.standard_error + noise;
    return r;
}

} // namespace ewaldqft
