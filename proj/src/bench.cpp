#include "ewaldqft/bench.hpp"

#include "ewaldqft/errors.hpp"
#include "ewaldqft/ewald_quantum.hpp"
#include "ewaldqft/rng.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

namespace ewaldqft {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Stats {
    double mean = 0.0;
    double sd = 0.0;
    double median = 0.0;
    double max = 0.0;
};

Stats stats_of(std::vector<double> v)
{
    Stats s;
    if (v.empty()) return s;
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    s.median = v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
    s.max = v.back();
    return s;
}

/// Runs f(0..count-1) on `workers` threads; results stay in index order.
template <class R>
std::vector<R> parallel_map(std::size_t count, unsigned workers, const std::function<R(std::size_t)>& f)
{
    std::vector<R> out(count);
    std::vector<std::exception_ptr> errors(count);
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                out[i] = f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& value, Parse parse)
{
    std::vector<T> out;
    for (auto item : split(value, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        out.push_back(parse(item.substr(b, e - b + 1)));
    }
    if (out.empty()) throw ValidationError("empty list");
    return out;
}

std::uint64_t parse_u64(const std::string& s)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ValidationError("not a number: '" + s + "'");
    }
    if (used != s.size() || v < 0 || v != std::floor(v) || v > 1.8e19)
        throw ValidationError("not a non-negative integer: '" + s + "'");
    return static_cast<std::uint64_t>(v);
}

double parse_real(const std::string& s)
{
    std::size_t used = 0;
    try {
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError("not a number: '" + s + "'");
}

std::string join(const std::vector<std::string>& items, char sep = ',')
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

std::string to_string(qsim::PrepMethod m) { return m == qsim::PrepMethod::Mottonen ? "mottonen" : "gleinig-hoefler"; }

void write_common_meta(std::ostream& out, const SweepSpec& spec)
{
    out << "# schema-version: " << kSchemaVersion << '\n';
    out << "# experiment: " << to_string(spec.experiment) << '\n';
    out << "# rng: " << kRngAlgorithm << '\n';
    out << "# cell_length: " << format_double(spec.cell_length) << '\n';
    out << "# eps_prime: " << format_double(spec.eps_prime) << '\n';
    out << "# sigma: " << (spec.sigma ? format_double(*spec.sigma) : std::string("default")) << '\n';
    out << "# kmax: " << (spec.kspace_cutoff ? std::to_string(*spec.kspace_cutoff) : std::string("M/2")) << '\n';
}

ChargeSystem make_system(const SweepSpec& spec, const GridSpec& grid, ConfigKind kind, std::size_t n,
                         std::uint64_t seed)
{
    return generate_configuration({kind, n, seed, 1.0}, grid.grid_size, grid.dim, spec.cell_length);
}

const std::vector<std::string> kBreakdownColumns = {
    "N",         "d",          "M",         "kind",      "seed",      "sigma",     "e_short",
    "e_long",    "e_self",     "e_dip",     "e_total",   "frac_short", "frac_long", "frac_self",
    "frac_dip",  "t_short_ns", "t_long_ns", "t_self_ns", "t_dip_ns"};
const std::vector<std::string> kTimingColumns = {
    "N",        "d",           "M",           "kind",          "K",           "prep",
    "samples",  "t_fft_mean_s", "t_fft_sd_s", "t_fft_median_s", "t_directk_mean_s", "t_directk_sd_s",
    "t_em_mean_s", "t_em_sd_s", "t_em_median_s", "t_em1_s",     "t_q1_s",      "t_q_mean_s",
    "t_q_sd_s", "prep_gates",  "qft_gates",   "gates_total",   "t_qproj_s"};
const std::vector<std::string> kErrorColumns = {
    "d",           "M",           "N",          "path",         "K",
    "seeds",       "mean_rel_err", "sd_rel_err", "median_rel_err", "max_rel_err",
    "oracle_converged", "oracle_max_rel_change"};

} // namespace

std::string to_string(Experiment experiment)
{
    switch (experiment) {
    case Experiment::Breakdown: return "breakdown";
    case Experiment::Timing: return "timing";
    case Experiment::Error: return "error";
    }
    return "unknown";
}

Experiment parse_experiment(const std::string& text)
{
    if (text == "breakdown") return Experiment::Breakdown;
    if (text == "timing") return Experiment::Timing;
    if (text == "error") return Experiment::Error;
    throw ValidationError("unknown experiment '" + text + "'");
}

EwaldParams SweepSpec::params_for(const GridSpec& grid) const
{
    EwaldParams p = default_params(grid.grid_size, cell_length);
    if (kspace_cutoff) {
        p.kspace_cutoff = *kspace_cutoff;
        p.sigma = std::max(0.3 * cell_length, 1.35 * cell_length / p.kspace_cutoff);
        p.real_cutoff = 5.0 * std::sqrt(2.0) * p.sigma;
    }
    if (sigma) {
        p.sigma = *sigma;
        p.real_cutoff = 5.0 * std::sqrt(2.0) * p.sigma;
    }
    p.eps_prime = eps_prime;
    return p;
}

SweepSpec default_spec(Experiment experiment)
{
    SweepSpec s;
    s.experiment = experiment;
    switch (experiment) {
    case Experiment::Breakdown:
        s.n_values = {32, 64, 128, 256, 512};
        s.grids = {{3, 32}};
        s.kinds = {ConfigKind::Mixed, ConfigKind::Separated};
        s.seeds = {1, 2, 3};
        s.repeats = 3;
        break;
    case Experiment::Timing:
        s.n_values = {8, 16, 32, 64, 128, 256, 512};
        s.grids = {{3, 32}};
        s.kinds = {ConfigKind::Mixed};
        s.seeds = {1, 2};
        s.shots = {100000};
        s.repeats = 5;
        break;
    case Experiment::Error:
        s.n_values = {16, 64, 128, 350};
        s.grids = {{2, 32}, {3, 16}};
        s.kinds = {ConfigKind::Mixed};
        s.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
        s.shots = {1000, 100000, 10000000};
        s.repeats = 1;
        s.warmup = 0;
        break;
    }
    return s;
}

void check_spec(const SweepSpec& spec)
{
    if (spec.n_values.empty()) throw ValidationError("sweep needs at least one N");
    if (spec.grids.empty()) throw ValidationError("sweep needs at least one grid");
    if (spec.kinds.empty()) throw ValidationError("sweep needs at least one configuration kind");
    if (spec.seeds.empty()) throw ValidationError("sweep needs at least one seed");
    if (spec.repeats < 1) throw ValidationError("repeats must be >= 1");
    if (spec.warmup < 0) throw ValidationError("warmup must be >= 0");
    if (!(spec.t_q1 > 0.0)) throw ValidationError("t_q1 must be positive");
    if (!(spec.cell_length > 0.0)) throw ValidationError("cell length must be positive");
    for (const auto& g : spec.grids) {
        if (g.dim != 2 && g.dim != 3) throw ValidationError("dimension must be 2 or 3");
        if (g.grid_size < 2 || !std::has_single_bit(static_cast<unsigned>(g.grid_size)))
            throw ValidationError("grid size must be a power of 2 >= 2");
        const std::size_t sites = g.dim == 3 ? static_cast<std::size_t>(g.grid_size) * g.grid_size * g.grid_size
                                             : static_cast<std::size_t>(g.grid_size) * g.grid_size;
        for (auto n : spec.n_values) {
            if (n < 1) throw ValidationError("N must be >= 1");
            if (n > sites)
                throw ValidationError("capacity: N = " + std::to_string(n) + " exceeds M^d = " + std::to_string(sites));
        }
    }
    if (spec.experiment != Experiment::Breakdown && spec.shots.empty())
        throw ValidationError("sweep needs at least one shot count K");
    for (auto k : spec.shots)
        if (k < 1) throw ValidationError("shot count must be >= 1");
    if (spec.experiment == Experiment::Timing && (spec.grids.size() != 1 || spec.kinds.size() != 1 || spec.shots.size() != 1))
        throw ValidationError("timing sweep takes a single grid, kind and K");
    if (spec.experiment == Experiment::Timing && spec.repeats < 5)
        throw ValidationError("timing sweep needs repeats >= 5");
}

void apply_config_entry(SweepSpec& spec, const std::string& key, const std::string& value)
{
    auto to_int = [](const std::string& s) { return static_cast<int>(parse_u64(s)); };
    if (key == "experiment") {
        spec.experiment = parse_experiment(value);
    } else if (key == "n") {
        spec.n_values = parse_list<std::size_t>(value, [](const std::string& s) { return parse_u64(s); });
    } else if (key == "dim" || key == "m") {
        if (spec.grids.empty()) spec.grids.push_back({});
        for (auto& g : spec.grids) (key == "dim" ? g.dim : g.grid_size) = to_int(value);
    } else if (key == "grids") {
        // d:M pairs, e.g. 2:32,3:16
        spec.grids = parse_list<GridSpec>(value, [&](const std::string& s) {
            const auto parts = split(s, ':');
            if (parts.size() != 2) throw ValidationError("grid entry must be d:M, got '" + s + "'");
            return GridSpec{to_int(parts[0]), to_int(parts[1])};
        });
    } else if (key == "kind") {
        spec.kinds = parse_list<ConfigKind>(value, [](const std::string& s) { return parse_config_kind(s); });
    } else if (key == "seeds" || key == "seed") {
        spec.seeds = parse_list<std::uint64_t>(value, parse_u64);
    } else if (key == "sigma") {
        spec.sigma = parse_real(value);
    } else if (key == "kmax") {
        spec.kspace_cutoff = to_int(value);
    } else if (key == "eps_prime") {
        spec.eps_prime = value == "inf" || value == "tinfoil" ? EwaldParams::tinfoil : parse_real(value);
    } else if (key == "shots") {
        spec.shots = parse_list<std::uint64_t>(value, parse_u64);
    } else if (key == "repeats") {
        spec.repeats = to_int(value);
    } else if (key == "warmup") {
        spec.warmup = to_int(value);
    } else if (key == "tq1_ns") {
        spec.t_q1 = parse_real(value) * 1e-9;
    } else if (key == "prep") {
        if (value == "mottonen") spec.prep = qsim::PrepMethod::Mottonen;
        else if (value == "gleinig-hoefler") spec.prep = qsim::PrepMethod::GleinigHoefler;
        else throw ValidationError("unknown prep method '" + value + "'");
    } else if (key == "oracle_nmax") {
        spec.oracle.n_max = to_int(value);
    } else if (key == "oracle_tol") {
        spec.oracle.tolerance = parse_real(value);
    } else if (key == "workers") {
        spec.workers = static_cast<unsigned>(parse_u64(value));
    } else if (key == "cell_length") {
        spec.cell_length = parse_real(value);
    } else {
        throw ValidationError("unknown config key '" + key + "'");
    }
}

void apply_config(SweepSpec& spec, std::istream& in)
{
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError("config line " + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto lo = s.find_first_not_of(" \t\r");
            const auto hi = s.find_last_not_of(" \t\r");
            return lo == std::string::npos ? std::string{} : s.substr(lo, hi - lo + 1);
        };
        try {
            apply_config_entry(spec, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const ValidationError& e) {
            throw ValidationError("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
}

double measure_emulator_gate_time(int n_qubits, int gates, int repeats)
{
    if (n_qubits < 2 || gates < 1 || repeats < 1) throw ValidationError("calibration needs >= 2 qubits, gates and repeats");
    qsim::Circuit c(n_qubits);
    for (int g = 0; g < gates; ++g) {
        const int j = (g / 2) % n_qubits;
        if (g % 2 == 0) c.add(qsim::GateOp::h(j));
        else c.add(qsim::GateOp::controlled_phase(2 + (g / 2) % 8, (j + 1) % n_qubits, j));
    }
    qsim::Statevector warm(n_qubits);
    qsim::apply_circuit(warm, c);
    std::vector<double> samples;
    for (int r = 0; r < repeats; ++r) {
        qsim::Statevector s(n_qubits);
        const auto start = Clock::now();
        qsim::apply_circuit(s, c);
        samples.push_back(seconds_since(start));
    }
    return stats_of(samples).median / gates;
}

double TimingModel::hardware_time(double t_em) const
{
    if (!(t_em1 > 0.0)) throw ValidationError("t_em1 must be measured before converting emulator time");
    return t_em * t_q1 / t_em1;
}

void run_breakdown_sweep(const SweepSpec& spec, std::ostream& out)
{
    if (spec.experiment != Experiment::Breakdown) throw ValidationError("spec is not a breakdown sweep");
    check_spec(spec);

    struct Point {
        GridSpec grid;
        std::size_t n;
        ConfigKind kind;
        std::uint64_t seed;
    };
    std::vector<Point> points;
    for (const auto& g : spec.grids)
        for (auto n : spec.n_values)
            for (auto k : spec.kinds)
                for (auto s : spec.seeds) points.push_back({g, n, k, s});

    auto rows = parallel_map<std::string>(points.size(), spec.workers, [&](std::size_t i) {
        const auto& pt = points[i];
        const auto sys = make_system(spec, pt.grid, pt.kind, pt.n, pt.seed);
        const auto params = spec.params_for(pt.grid);
        check_params(params, sys);

        double e[4] = {};
        std::vector<double> t[4];
        for (int r = -spec.warmup; r < spec.repeats; ++r) {
            double dt[4];
            auto start = Clock::now();
            e[0] = real_space_energy(sys, params);
            dt[0] = seconds_since(start);
            start = Clock::now();
            e[1] = reciprocal_energy_fft(sys, params);
            dt[1] = seconds_since(start);
            start = Clock::now();
            e[2] = self_energy(sys, params);
            dt[2] = seconds_since(start);
            start = Clock::now();
            e[3] = dipole_energy(sys, params);
            dt[3] = seconds_since(start);
            if (r >= 0)
                for (int k = 0; k < 4; ++k) t[k].push_back(dt[k]);
        }
        const double total = e[0] + e[1] + e[2] + e[3];
        std::vector<std::string> cells = {std::to_string(pt.n),      std::to_string(pt.grid.dim),
                                          std::to_string(pt.grid.grid_size), to_string(pt.kind),
                                          std::to_string(pt.seed),   format_double(params.sigma, 17)};
        for (double v : e) cells.push_back(format_energy(v));
        cells.push_back(format_energy(total));
        for (double v : e) cells.push_back(format_energy(std::abs(v) / std::abs(total)));
        for (auto& v : t) cells.push_back(std::to_string(static_cast<long long>(std::llround(stats_of(v).median * 1e9))));
        return join(cells) + '\n';
    });

    write_common_meta(out, spec);
    out << "# backend: fft\n";
    out << "# repeats: " << spec.repeats << " (median, " << spec.warmup << " warm-up excluded)\n";
    out << "# timing-columns: t_short_ns,t_long_ns,t_self_ns,t_dip_ns\n";
    out << join(kBreakdownColumns) << '\n';
    for (const auto& r : rows) out << r;
}

void run_timing_sweep(const SweepSpec& spec, std::ostream& out)
{
    if (spec.experiment != Experiment::Timing) throw ValidationError("spec is not a timing sweep");
    check_spec(spec);
    const GridSpec grid = spec.grids.front();
    const ConfigKind kind = spec.kinds.front();
    const std::uint64_t shots = spec.shots.front();
    const auto params = spec.params_for(grid);

    TimingModel model;
    model.t_q1 = spec.t_q1;
    model.n_qubits = grid.dim * std::countr_zero(static_cast<unsigned>(grid.grid_size));
    model.t_em1 = measure_emulator_gate_time(model.n_qubits, model.calibration_gates);

    std::vector<std::string> rows;
    for (auto n : spec.n_values) {
        std::vector<double> fft, direct, em;
        for (auto seed : spec.seeds) {
            const auto sys = make_system(spec, grid, kind, n, seed);
            check_params(params, sys);
            for (int r = -spec.warmup; r < spec.repeats; ++r) {
                auto start = Clock::now();
                reciprocal_energy_fft(sys, params);
                const double a = seconds_since(start);
                start = Clock::now();
                reciprocal_energy_direct(sys, params);
                const double b = seconds_since(start);
                start = Clock::now();
                estimate_reciprocal_energy(sys, params, EstimateMode::Sampled, shots, seed);
                const double c = seconds_since(start);
                if (r < 0) continue;
                fft.push_back(a);
                direct.push_back(b);
                em.push_back(c);
            }
        }
        const auto sf = stats_of(fft), sd = stats_of(direct), se = stats_of(em);
        const auto gates = qsim::gate_count_model(n, grid.grid_size, grid.dim, spec.prep, true);
        const double t_q_mean = model.hardware_time(se.mean);
        const double t_q_sd = model.hardware_time(se.sd);
        const double projected = static_cast<double>(shots) * static_cast<double>(gates.total) * spec.t_q1;
        rows.push_back(join({std::to_string(n), std::to_string(grid.dim), std::to_string(grid.grid_size),
                             to_string(kind), std::to_string(shots), to_string(spec.prep),
                             std::to_string(fft.size()), format_energy(sf.mean), format_energy(sf.sd),
                             format_energy(sf.median), format_energy(sd.mean), format_energy(sd.sd),
                             format_energy(se.mean), format_energy(se.sd), format_energy(se.median),
                             format_energy(model.t_em1), format_energy(model.t_q1), format_energy(t_q_mean),
                             format_energy(t_q_sd), std::to_string(gates.prep), std::to_string(gates.qft),
                             std::to_string(gates.total), format_energy(projected)}) +
                       '\n');
    }

    std::ostringstream body;
    write_common_meta(body, spec);
    body << "# t_em1_s: " << format_energy(model.t_em1) << '\n';
    body << "# t_q1_s: " << format_energy(model.t_q1) << '\n';
    body << "# calibration: " << model.calibration_gates << " gates on " << model.n_qubits << " qubits, median of 5\n";
    body << "# t_q: t_em_mean_s * t_q1_s / t_em1_s\n";
    body << "# t_qproj: K * gates_total * t_q1_s\n";
    body << "# repeats: " << spec.repeats << " per seed (" << spec.warmup << " warm-up excluded)\n";
    body << "# timing-columns: t_fft_mean_s,t_fft_sd_s,t_fft_median_s,t_directk_mean_s,t_directk_sd_s,t_em_mean_s,"
            "t_em_sd_s,t_em_median_s,t_em1_s,t_q_mean_s,t_q_sd_s\n";
    body << join(kTimingColumns) << '\n';
    for (const auto& r : rows) body << r;

    // The crossover lines are re-derived from the table itself.
    std::istringstream in(body.str());
    const auto table = read_csv(in);
    out << body.str();
    for (const auto& c : crossover_report(table)) out << "# " << format_crossover(c) << '\n';
}

bool run_error_sweep(const SweepSpec& spec, std::ostream& out)
{
    if (spec.experiment != Experiment::Error) throw ValidationError("spec is not an error sweep");
    check_spec(spec);

    struct Point {
        GridSpec grid;
        std::size_t n;
        std::uint64_t seed;
    };
    struct Result {
        double classical = 0.0, qexact = 0.0;
        std::vector<double> sampled;
        bool converged = false;
        double rel_change = 0.0;
    };
    std::vector<Point> points;
    for (const auto& g : spec.grids)
        for (auto n : spec.n_values)
            for (auto s : spec.seeds) points.push_back({g, n, s});

    const auto kind = spec.kinds.front();
    auto results = parallel_map<Result>(points.size(), spec.workers, [&](std::size_t i) {
        const auto& pt = points[i];
        const auto sys = make_system(spec, pt.grid, kind, pt.n, pt.seed);
        const auto params = spec.params_for(pt.grid);
        const auto oracle = converged_direct_sum(sys, spec.oracle);
        const double rest = real_space_energy(sys, params) + self_energy(sys, params) + dipole_energy(sys, params);
        const auto rel = [&](double e_long) { return std::abs(rest + e_long - oracle.energy) / std::abs(oracle.energy); };
        Result r;
        r.converged = oracle.converged;
        r.rel_change = oracle.rel_change;
        r.classical = rel(reciprocal_energy_fft(sys, params));
        r.qexact = rel(estimate_reciprocal_energy(sys, params, EstimateMode::Exact).e_long);
        for (auto k : spec.shots)
            r.sampled.push_back(rel(estimate_reciprocal_energy(sys, params, EstimateMode::Sampled, k, pt.seed).e_long));
        return r;
    });

    const auto params0 = spec.params_for(spec.grids.front());
    write_common_meta(out, spec);
    out << "# kind: " << to_string(kind) << '\n';
    out << "# oracle: cubic image shells, two-level Richardson, n_max " << spec.oracle.n_max << ", tolerance "
        << format_double(spec.oracle.tolerance) << '\n';
    out << "# reference-boundary: eps_prime " << format_double(params0.eps_prime) << '\n';
    out << join(kErrorColumns) << '\n';

    bool all_converged = true;
    std::size_t i = 0;
    for (const auto& g : spec.grids)
        for (auto n : spec.n_values) {
            const std::size_t first = i;
            i += spec.seeds.size();
            std::vector<double> classical, qexact;
            std::vector<std::vector<double>> sampled(spec.shots.size());
            std::size_t converged = 0;
            double worst = 0.0;
            for (std::size_t j = first; j < i; ++j) {
                const auto& r = results[j];
                classical.push_back(r.classical);
                qexact.push_back(r.qexact);
                for (std::size_t k = 0; k < spec.shots.size(); ++k) sampled[k].push_back(r.sampled[k]);
                converged += r.converged ? 1 : 0;
                worst = std::max(worst, r.rel_change);
            }
            all_converged = all_converged && converged == spec.seeds.size();
            auto emit = [&](const std::string& path, std::uint64_t k, const std::vector<double>& v) {
                const auto s = stats_of(v);
                out << join({std::to_string(g.dim), std::to_string(g.grid_size), std::to_string(n), path,
                             std::to_string(k), std::to_string(v.size()), format_energy(s.mean), format_energy(s.sd),
                             format_energy(s.median), format_energy(s.max),
                             std::to_string(converged) + "/" + std::to_string(spec.seeds.size()),
                             format_energy(worst)})
                    << '\n';
            };
            emit("classical", 0, classical);
            emit("qexact", 0, qexact);
            for (std::size_t k = 0; k < spec.shots.size(); ++k) emit("qsampled", spec.shots[k], sampled[k]);
        }
    return all_converged;
}

std::vector<Crossover> crossover_report(const CsvTable& timing)
{
    check_schema(timing, Experiment::Timing);
    std::vector<std::size_t> order(timing.rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return timing.number(a, "N") < timing.number(b, "N"); });

    std::vector<Crossover> out;
    for (const auto& [name, column] :
         {std::pair<std::string, std::string>{"T_q", "t_q_mean_s"}, {"T_q'", "t_qproj_s"}}) {
        Crossover c;
        c.model = name + " vs fft";
        // Walk down from the largest N while quantum stays below classical.
        std::optional<std::size_t> from;
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            if (timing.number(*it, column) < timing.number(*it, "t_fft_mean_s")) from = *it;
            else break;
        }
        if (from) {
            c.n_star = timing.number(*from, "N");
            c.below_everywhere = *from == order.front();
        }
        out.push_back(c);
    }
    return out;
}

std::string format_crossover(const Crossover& c)
{
    std::string s = "crossover " + c.model + ": ";
    if (!c.n_star) return s + "none";
    s += "N* = " + format_double(*c.n_star);
    if (c.below_everywhere) s += " (below classical over the whole sweep)";
    return s;
}

Experiment detect_experiment(const CsvTable& table)
{
    auto it = table.meta.find("experiment");
    if (it == table.meta.end()) throw ValidationError("CSV schema mismatch: no experiment line");
    return parse_experiment(it->second);
}

void check_schema(const CsvTable& table, Experiment experiment)
{
    auto v = table.meta.find("schema-version");
    if (v == table.meta.end() || v->second != std::to_string(kSchemaVersion))
        throw ValidationError("CSV schema mismatch: expected schema-version " + std::to_string(kSchemaVersion));
    if (detect_experiment(table) != experiment)
        throw ValidationError("CSV schema mismatch: file is a " + to_string(detect_experiment(table)) +
                              " table, expected " + to_string(experiment));
    const auto& cols = experiment == Experiment::Breakdown ? kBreakdownColumns
                       : experiment == Experiment::Timing  ? kTimingColumns
                                                           : kErrorColumns;
    for (const auto& c : cols) table.column(c);
}

} // namespace ewaldqft
