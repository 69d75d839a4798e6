#include "ewaldqft/ewald.hpp"

#include "ewaldqft/csv.hpp"
#include "ewaldqft/errors.hpp"
#include "ewaldqft/ewald_quantum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

namespace ewaldqft {

namespace {

constexpr double kPi = std::numbers::pi;

double gaussian_weight(double sigma, double cell_length, long m2)
{
    const double scale = 2.0 * kPi / cell_length;
    const double k2 = scale * scale * static_cast<double>(m2);
    return std::exp(-0.5 * sigma * sigma * k2) / k2;
}

/// Lower bound of the per-axis wavevector range. At k_max = M/2 the -M/2
/// face aliases +M/2 on the grid and is skipped.
int lower_m(int kmax, int grid_size) { return 2 * kmax == grid_size ? -kmax + 1 : -kmax; }

} // namespace

EwaldParams default_params(int grid_size, double cell_length)
{
    EwaldParams p;
    p.kspace_cutoff = std::max(1, grid_size / 2);
    p.sigma = std::max(0.3 * cell_length, 1.35 * cell_length / p.kspace_cutoff);
    p.real_cutoff = 5.0 * std::numbers::sqrt2 * p.sigma;
    return p;
}

EwaldParams with_sigma(EwaldParams params, double sigma)
{
    params.sigma = sigma;
    return params;
}

void check_params(const EwaldParams& params, const ChargeSystem& system)
{
    if (!(params.sigma > 0.0) || !std::isfinite(params.sigma)) throw ValidationError("sigma must be positive");
    if (!(params.real_cutoff > 0.0) || !std::isfinite(params.real_cutoff))
        throw ValidationError("real-space cutoff must be positive");
    if (params.kspace_cutoff < 1) throw ValidationError("k_max must be >= 1");
    if (params.image_shells < 0) throw ValidationError("image shell count must be >= 0");
    if (!(params.eps_prime >= 1.0)) throw ValidationError("eps' must be >= 1 or infinite");
    if (params.real_space == RealSpaceSum::MinimumImage && params.real_cutoff > 0.5 * system.cell_length())
        throw ValidationError("configuration: minimum-image real-space sum needs r_c <= L/2");
}

std::string to_string(Backend backend)
{
    switch (backend) {
    case Backend::DirectK: return "directk";
    case Backend::GridFFT: return "fft";
    case Backend::QuantumExact: return "qexact";
    case Backend::QuantumSampled: return "qsampled";
    }
    return "unknown";
}

Backend parse_backend(const std::string& text)
{
    if (text == "directk") return Backend::DirectK;
    if (text == "fft") return Backend::GridFFT;
    if (text == "qexact") return Backend::QuantumExact;
    if (text == "qsampled") return Backend::QuantumSampled;
    throw ValidationError("unknown backend '" + text + "'");
}

double real_space_energy(const ChargeSystem& system, const EwaldParams& params)
{
    check_params(params, system);
    const double length = system.cell_length();
    const double rc = params.real_cutoff;
    const double rc2 = rc * rc;
    const double inv_width = 1.0 / (std::numbers::sqrt2 * params.sigma);
    const bool minimum_image = params.real_space == RealSpaceSum::MinimumImage;
    const int span = minimum_image ? 0 : static_cast<int>(std::ceil(rc / length + 0.5));

    // Pair term for a minimum-image displacement d, summed over images.
    const auto pair_sum = [&](std::array<double, 3> d) {
        double acc = 0.0;
        for (int i = -span; i <= span; ++i) {
            const double x = d[0] + i * length;
            if (x * x > rc2) continue;
            for (int j = -span; j <= span; ++j) {
                const double y = d[1] + j * length;
                const double xy = x * x + y * y;
                if (xy > rc2) continue;
                for (int k = -span; k <= span; ++k) {
                    const double z = d[2] + k * length;
                    const double r2 = xy + z * z;
                    if (r2 > rc2 || r2 == 0.0) continue;
                    const double r = std::sqrt(r2);
                    acc += std::erfc(r * inv_width) / r;
                }
            }
        }
        return acc;
    };

    const auto charges = system.charges();
    const double h = system.spacing();
    const int m = system.grid_size();
    double total = 0.0;
    for (std::size_t i = 0; i < charges.size(); ++i) {
        // i == j contributes only through images.
        total += 0.5 * charges[i].q * charges[i].q * pair_sum({0.0, 0.0, 0.0});
        for (std::size_t j = i + 1; j < charges.size(); ++j) {
            std::array<double, 3> d{};
            for (int a = 0; a < 3; ++a) {
                int delta = charges[j].x[a] - charges[i].x[a];
                if (2 * delta > m) delta -= m;
                if (2 * delta < -m) delta += m;
                d[a] = delta * h;
            }
            total += charges[i].q * charges[j].q * pair_sum(d);
        }
    }
    return total;
}

double self_energy(const ChargeSystem& system, const EwaldParams& params)
{
    if (!(params.sigma > 0.0)) throw ValidationError("sigma must be positive");
    return -system.sum_q2() / (std::sqrt(2.0 * kPi) * params.sigma);
}

double dipole_energy(const ChargeSystem& system, const EwaldParams& params)
{
    if (!(params.eps_prime >= 1.0)) throw ValidationError("eps' must be >= 1 or infinite");
    if (std::isinf(params.eps_prime)) return 0.0;
    const auto d = system.dipole();
    const double d2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    return 2.0 * kPi / ((1.0 + 2.0 * params.eps_prime) * system.volume()) * d2;
}

double reciprocal_energy_direct(const ChargeSystem& system, const EwaldParams& params)
{
    check_params(params, system);
    const int m = system.grid_size();
    const int kmax = params.kspace_cutoff;
    const int lo = lower_m(kmax, m);
    const bool planar = system.dim() == 2;

    // Phases 2 pi (m . x) / M reduced exactly in integers.
    std::vector<double> cos_table(static_cast<std::size_t>(m)), sin_table(static_cast<std::size_t>(m));
    for (int t = 0; t < m; ++t) {
        cos_table[static_cast<std::size_t>(t)] = std::cos(2.0 * kPi * t / m);
        sin_table[static_cast<std::size_t>(t)] = std::sin(2.0 * kPi * t / m);
    }
    const auto charges = system.charges();
    const auto structure_factor2 = [&](int mx, int my, int mz) {
        double re = 0.0, im = 0.0;
        for (const auto& c : charges) {
            long phase = static_cast<long>(mx) * c.x[0] + static_cast<long>(my) * c.x[1] + static_cast<long>(mz) * c.x[2];
            phase %= m;
            if (phase < 0) phase += m;
            re += c.q * cos_table[static_cast<std::size_t>(phase)];
            im += c.q * sin_table[static_cast<std::size_t>(phase)];
        }
        return re * re + im * im;
    };

    double sum = 0.0;
    for (int mx = lo; mx <= kmax; ++mx)
        for (int my = lo; my <= kmax; ++my) {
            if (planar) {
                // Charges sit at z = 0, so S does not depend on m_z.
                const double s2 = structure_factor2(mx, my, 0);
                for (int mz = -kmax; mz <= kmax; ++mz) {
                    const long m2 = static_cast<long>(mx) * mx + static_cast<long>(my) * my + static_cast<long>(mz) * mz;
                    if (m2 == 0) continue;
                    sum += gaussian_weight(params.sigma, system.cell_length(), m2) * s2;
                }
            } else {
                for (int mz = lo; mz <= kmax; ++mz) {
                    const long m2 = static_cast<long>(mx) * mx + static_cast<long>(my) * my + static_cast<long>(mz) * mz;
                    if (m2 == 0) continue;
                    sum += gaussian_weight(params.sigma, system.cell_length(), m2) * structure_factor2(mx, my, mz);
                }
            }
        }
    return 2.0 * kPi / system.volume() * sum;
}

std::vector<double> reciprocal_weight_table(int dim, int grid_size, double cell_length, const EwaldParams& params)
{
    if (dim != 2 && dim != 3) throw ValidationError("dimension must be 2 or 3");
    const int m = grid_size;
    const int kmax = params.kspace_cutoff;
    if (2 * kmax > m) throw CapabilityError("grid cannot represent k_max > M/2");
    const std::size_t sites = dim == 3 ? static_cast<std::size_t>(m) * m * m : static_cast<std::size_t>(m) * m;
    std::vector<double> w(sites, 0.0);

    const auto in_range = [&](int v) { return v >= lower_m(kmax, m) && v <= kmax; };
    std::size_t idx = 0;
    if (dim == 3) {
        for (int sx = 0; sx < m; ++sx)
            for (int sy = 0; sy < m; ++sy)
                for (int sz = 0; sz < m; ++sz, ++idx) {
                    const int mx = fold_index(sx, m), my = fold_index(sy, m), mz = fold_index(sz, m);
                    if (!in_range(mx) || !in_range(my) || !in_range(mz)) continue;
                    const long m2 = static_cast<long>(mx) * mx + static_cast<long>(my) * my + static_cast<long>(mz) * mz;
                    if (m2 != 0) w[idx] = gaussian_weight(params.sigma, cell_length, m2);
                }
    } else {
        for (int sx = 0; sx < m; ++sx)
            for (int sy = 0; sy < m; ++sy, ++idx) {
                const int mx = fold_index(sx, m), my = fold_index(sy, m);
                if (!in_range(mx) || !in_range(my)) continue;
                double acc = 0.0;
                for (int mz = -kmax; mz <= kmax; ++mz) {
                    const long m2 = static_cast<long>(mx) * mx + static_cast<long>(my) * my + static_cast<long>(mz) * mz;
                    if (m2 != 0) acc += gaussian_weight(params.sigma, cell_length, m2);
                }
                w[idx] = acc;
            }
    }
    return w;
}

double reciprocal_energy_fft(const ChargeSystem& system, const EwaldParams& params)
{
    check_params(params, system);
    const int m = system.grid_size();
    if (!std::has_single_bit(static_cast<unsigned>(m))) throw CapabilityError("FFT backend needs a power-of-2 grid");
    const auto weights = reciprocal_weight_table(system.dim(), m, system.cell_length(), params);
    const std::size_t sites = weights.size();

    // Exact assignment: every charge sits on a grid point.
    auto* grid = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * sites));
    if (grid == nullptr) throw std::bad_alloc();
    std::fill_n(&grid[0][0], 2 * sites, 0.0);
    for (const auto& c : system.charges()) {
        std::size_t idx = 0;
        for (int a = 0; a < system.dim(); ++a) idx = idx * static_cast<std::size_t>(m) + static_cast<std::size_t>(c.x[a]);
        grid[idx][0] += c.q;
    }

    fftw_plan plan;
    {
        // FFTW planning is not thread-safe; execution is.
        static std::mutex planner;
        std::lock_guard lock(planner);
        const int shape[3] = {m, m, m};
        plan = fftw_plan_dft(system.dim(), shape, grid, grid, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);

    // FFTW_BACKWARD carries exp(+2 pi i s.x / M), i.e. S(k) itself.
    double sum = 0.0;
    for (std::size_t s = 0; s < sites; ++s) {
        if (weights[s] == 0.0) continue;
        sum += weights[s] * (grid[s][0] * grid[s][0] + grid[s][1] * grid[s][1]);
    }
    {
        static std::mutex destroyer;
        std::lock_guard lock(destroyer);
        fftw_destroy_plan(plan);
    }
    fftw_free(grid);
    return 2.0 * kPi / system.volume() * sum;
}

EnergyBreakdown total_energy(const ChargeSystem& system, const EwaldParams& params, Backend backend,
                             const SamplingOptions& sampling)
{
    check_params(params, system);
    const auto start = std::chrono::steady_clock::now();
    EnergyBreakdown e;
    e.backend = backend;
    e.sigma = params.sigma;
    e.real_cutoff = params.real_cutoff;
    e.kspace_cutoff = params.kspace_cutoff;
    e.e_short = real_space_energy(system, params);
    switch (backend) {
    case Backend::DirectK:
        e.e_long = reciprocal_energy_direct(system, params);
        break;
    case Backend::GridFFT:
        e.e_long = reciprocal_energy_fft(system, params);
        break;
    case Backend::QuantumExact:
        e.e_long = estimate_reciprocal_energy(system, params, EstimateMode::Exact).e_long;
        break;
    case Backend::QuantumSampled:
        e.shots = sampling.shots;
        e.seed = sampling.seed;
        e.e_long =
            estimate_reciprocal_energy(system, params, EstimateMode::Sampled, sampling.shots, sampling.seed).e_long;
        break;
    }
    e.e_self = self_energy(system, params);
    e.e_dip = dipole_energy(system, params);
    e.e_total = e.e_short + e.e_long + e.e_self + e.e_dip;
    e.wall_ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
    return e;
}

std::string energy_csv_header()
{
    return "# schema-version: " + std::to_string(kSchemaVersion) +
           "\nN,d,M,sigma,backend,e_short,e_long,e_self,e_dip,e_total,wall_ns,K\n";
}

std::string energy_csv_row(const ChargeSystem& system, const EnergyBreakdown& e)
{
    std::string row = std::to_string(system.size()) + ',' + std::to_string(system.dim()) + ',' +
                      std::to_string(system.grid_size()) + ',' + format_energy(e.sigma) + ',' + to_string(e.backend);
    for (double v : {e.e_short, e.e_long, e.e_self, e.e_dip, e.e_total}) row += ',' + format_energy(v);
    row += ',' + std::to_string(e.wall_ns) + ',' + std::to_string(e.shots) + '\n';
    return row;
}

} // namespace ewaldqft
