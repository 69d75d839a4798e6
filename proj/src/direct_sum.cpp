#include "ewaldqft/direct_sum.hpp"

#include "ewaldqft/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <tuple>

namespace ewaldqft {

namespace {

constexpr std::size_t kNoSlot = static_cast<std::size_t>(-1);

} // namespace

std::size_t CoulombLatticeKernel::key(int a, int b, int c) const
{
    std::array<int, 3> t{std::abs(a), std::abs(b), std::abs(c)};
    std::sort(t.begin(), t.end());
    const auto m = static_cast<std::size_t>(grid_size_);
    return (static_cast<std::size_t>(t[0]) * m + static_cast<std::size_t>(t[1])) * m + static_cast<std::size_t>(t[2]);
}

CoulombLatticeKernel::CoulombLatticeKernel(int dim, int grid_size, double cell_length, int n_max)
    : dim_(dim), grid_size_(grid_size), length_(cell_length), n_max_(n_max)
{
    if (n_max < 0) throw ValidationError("image shell count must be >= 0");
    if (dim != 2 && dim != 3) throw ValidationError("dimension must be 2 or 3");
    const int m = grid_size;
    slot_.assign(static_cast<std::size_t>(m) * m * m, kNoSlot);

    // Sorted triples u <= v <= w of absolute displacements; in-plane systems
    // only ever produce a zero component.
    std::vector<std::array<int, 3>> triples;
    for (int u = 0; u < m; ++u)
        for (int v = u; v < m; ++v)
            for (int w = v; w < m; ++w) {
                if (dim == 2 && u != 0) continue;
                slot_[key(u, v, w)] = triples.size();
                triples.push_back({u, v, w});
            }
    rows_ = triples.size();
    shells_.assign(static_cast<std::size_t>(n_max + 1) * rows_, 0.0);

    const double h = cell_length / grid_size;
    std::vector<double> acc(static_cast<std::size_t>(n_max) + 1);
    for (std::size_t row = 0; row < rows_; ++row) {
        const auto& t = triples[row];
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int i = -n_max; i <= n_max; ++i) {
            const double x = t[0] + static_cast<double>(i) * m;
            for (int j = -n_max; j <= n_max; ++j) {
                const double y = t[1] + static_cast<double>(j) * m;
                const int sij = std::max(std::abs(i), std::abs(j));
                for (int k = -n_max; k <= n_max; ++k) {
                    const double z = t[2] + static_cast<double>(k) * m;
                    const double r2 = x * x + y * y + z * z;
                    if (r2 == 0.0) continue; // self term at n = 0
                    acc[static_cast<std::size_t>(std::max(sij, std::abs(k)))] += 1.0 / (h * std::sqrt(r2));
                }
            }
        }
        for (int s = 0; s <= n_max; ++s) shells_[static_cast<std::size_t>(s) * rows_ + row] = acc[s];
    }
}

std::vector<double> CoulombLatticeKernel::shell_energies(const ChargeSystem& system) const
{
    if (system.dim() != dim_ || system.grid_size() != grid_size_ || system.cell_length() != length_)
        throw ValidationError("lattice kernel built for a different grid");

    // Non-periodic pair correlation C(delta) = sum_{i,j: x_j - x_i = delta} q_i q_j,
    // folded onto kernel rows.
    std::vector<double> corr(rows_, 0.0);
    const auto charges = system.charges();
    for (std::size_t i = 0; i < charges.size(); ++i)
        for (std::size_t j = 0; j < charges.size(); ++j) {
            const auto& a = charges[i].x;
            const auto& b = charges[j].x;
            const std::size_t row = slot_[key(b[0] - a[0], b[1] - a[1], b[2] - a[2])];
            corr[row] += charges[i].q * charges[j].q;
        }

    std::vector<double> energies(static_cast<std::size_t>(n_max_) + 1);
    double total = 0.0;
    for (int s = 0; s <= n_max_; ++s) {
        const double* g = &shells_[static_cast<std::size_t>(s) * rows_];
        double shell = 0.0;
        for (std::size_t row = 0; row < rows_; ++row) shell += corr[row] * g[row];
        total += 0.5 * shell;
        energies[static_cast<std::size_t>(s)] = total;
    }
    return energies;
}

std::shared_ptr<const CoulombLatticeKernel> CoulombLatticeKernel::shared(int dim, int grid_size, double cell_length,
                                                                       int n_max)
{
    using Key = std::tuple<int, int, double, int>;
    static std::mutex mutex;
    static std::map<Key, std::shared_ptr<const CoulombLatticeKernel>> cache;
    const Key k{dim, grid_size, cell_length, n_max};
    std::lock_guard lock(mutex);
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    auto kernel = std::make_shared<const CoulombLatticeKernel>(dim, grid_size, cell_length, n_max);
    cache.emplace(k, kernel);
    return kernel;
}

double direct_sum_energy(const ChargeSystem& system, int n_max)
{
    if (n_max < 0) throw ValidationError("image shell count must be >= 0");
    return CoulombLatticeKernel::shared(system.dim(), system.grid_size(), system.cell_length(), n_max)
        ->shell_energies(system)
        .back();
}

double richardson_extrapolate(double e_m, double e_2m, double e_4m)
{
    const double r1 = (4.0 * e_2m - e_m) / 3.0;
    const double r2 = (4.0 * e_4m - e_2m) / 3.0;
    return (8.0 * r2 - r1) / 7.0;
}

DirectSumResult converged_direct_sum(const ChargeSystem& system, const DirectSumOptions& options)
{
    if (options.n_max < 8 || options.n_max % 8 != 0)
        throw ValidationError("direct-sum n_max must be a positive multiple of 8");
    const auto kernel =
        CoulombLatticeKernel::shared(system.dim(), system.grid_size(), system.cell_length(), options.n_max);

    DirectSumResult result;
    result.shell_energies = kernel->shell_energies(system);
    const auto& e = result.shell_energies;
    const auto n = static_cast<std::size_t>(options.n_max);
    result.n_max = options.n_max;
    result.tolerance = options.tolerance;
    result.raw = e[n];
    result.energy = richardson_extrapolate(e[n / 4], e[n / 2], e[n]);
    const double previous = richardson_extrapolate(e[n / 8], e[n / 4], e[n / 2]);
    const double scale = std::max(std::abs(result.energy), 1e-300);
    result.rel_change = std::abs(result.energy - previous) / scale;
    result.converged = result.rel_change <= options.tolerance;
    return result;
}

} // namespace ewaldqft
