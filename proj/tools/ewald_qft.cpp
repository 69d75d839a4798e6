#include "ewaldqft/bench.hpp"
#include "ewaldqft/charge_system.hpp"
#include "ewaldqft/csv.hpp"
#include "ewaldqft/direct_sum.hpp"
#include "ewaldqft/errors.hpp"
#include "ewaldqft/ewald.hpp"
#include "ewaldqft/ewald_quantum.hpp"
#include "ewaldqft/svg_plot.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

using namespace ewaldqft;

namespace {

/// Writes to --out, or stdout when it is empty or "-".
class Output {
public:
    explicit Output(const std::string& path)
    {
        if (path.empty() || path == "-") return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw ValidationError("cannot open '" + path + "' for writing");
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct SystemOptions {
    std::string in;
    std::size_t n = 16;
    int m = 16;
    int dim = 3;
    std::string kind = "mixed";
    std::uint64_t seed = 1;
    double length = 1.0;

    void add(CLI::App* app, bool with_input)
    {
        if (with_input) app->add_option("--in", in, "Read the system from a file written by `generate`");
        app->add_option("--n", n, "Number of charges");
        app->add_option("--m", m, "Grid points per axis (power of 2)");
        app->add_option("--dim", dim, "Dimension, 2 or 3");
        app->add_option("--kind", kind, "mixed | separated | rocksalt");
        app->add_option("--seed", seed, "Configuration seed");
        app->add_option("--length", length, "Cell side L");
    }

    ChargeSystem build() const
    {
        if (!in.empty()) {
            std::ifstream f(in);
            if (!f) throw ValidationError("cannot open '" + in + "'");
            return read_system(f);
        }
        if (kind == "rocksalt") return rocksalt_lattice(m, dim, length);
        return generate_configuration({parse_config_kind(kind), n, seed, 1.0}, m, dim, length);
    }
};

struct SweepOptions {
    std::string config, n, kind, seeds, shots, grids, prep;
    std::optional<int> m, dim, kmax, repeats, warmup, oracle_nmax;
    std::optional<unsigned> workers;
    std::optional<double> sigma, tq1_ns, oracle_tol;
    std::string out, svg;

    void add(CLI::App* app)
    {
        app->add_option("--config", config, "key=value config file; flags override it");
        app->add_option("--n", n, "Comma-separated N list");
        app->add_option("--m", m, "Grid points per axis");
        app->add_option("--dim", dim, "Dimension, 2 or 3");
        app->add_option("--grids", grids, "Comma-separated d:M list, e.g. 2:32,3:16");
        app->add_option("--kind", kind, "Comma-separated mixed | separated");
        app->add_option("--seed,--seeds", seeds, "Comma-separated seed list");
        app->add_option("--sigma", sigma, "Ewald splitting width");
        app->add_option("--kmax", kmax, "k-space cutoff");
        app->add_option("--shots", shots, "Comma-separated K list");
        app->add_option("--repeats", repeats, "Timed repeats per point");
        app->add_option("--warmup", warmup, "Untimed warm-up runs per point");
        app->add_option("--tq1-ns", tq1_ns, "Hardware time per gate in ns (default 50)");
        app->add_option("--prep", prep, "mottonen | gleinig-hoefler");
        app->add_option("--oracle-nmax", oracle_nmax, "Direct-sum image shells (multiple of 8)");
        app->add_option("--oracle-tol", oracle_tol, "Direct-sum convergence tolerance");
        app->add_option("--workers", workers, "Worker threads (0 = all cores)");
        app->add_option("--out", out, "CSV output file (default stdout)");
        app->add_option("--svg", svg, "Also render the CSV to this SVG file");
    }

    SweepSpec build(Experiment e) const
    {
        SweepSpec s = default_spec(e);
        if (!config.empty()) {
            std::istringstream in(slurp(config));
            apply_config(s, in);
            if (s.experiment != e) throw ValidationError("config file is for the " + to_string(s.experiment) + " experiment");
        }
        auto set = [&](const char* key, const std::string& v) {
            if (!v.empty()) apply_config_entry(s, key, v);
        };
        set("grids", grids);
        if (dim) apply_config_entry(s, "dim", std::to_string(*dim));
        if (m) apply_config_entry(s, "m", std::to_string(*m));
        set("n", n);
        set("kind", kind);
        set("seeds", seeds);
        set("shots", shots);
        set("prep", prep);
        if (sigma) s.sigma = *sigma;
        if (kmax) s.kspace_cutoff = *kmax;
        if (repeats) s.repeats = *repeats;
        if (warmup) s.warmup = *warmup;
        if (tq1_ns) s.t_q1 = *tq1_ns * 1e-9;
        if (oracle_nmax) s.oracle.n_max = *oracle_nmax;
        if (oracle_tol) s.oracle.tolerance = *oracle_tol;
        if (workers) s.workers = *workers;
        return s;
    }

    /// Emits the CSV, then the SVG rendered from the CSV text just written.
    void emit(const std::string& csv) const
    {
        Output o(out);
        o.stream() << csv;
        if (!svg.empty()) {
            std::istringstream in(csv);
            const auto table = read_csv(in);
            Output f(svg);
            f.stream() << render_csv_plot(table);
        }
    }
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Ewald electrostatics with a classical or emulated-quantum reciprocal term"};
    app.require_subcommand(1);

    SystemOptions gen_opts;
    std::string gen_out;
    auto* generate = app.add_subcommand("generate", "Write a charge configuration");
    gen_opts.add(generate, false);
    generate->add_option("--out", gen_out, "Output file (default stdout)");

    SystemOptions sys_opts;
    std::optional<double> sigma;
    std::optional<int> kmax;
    std::string backend = "fft", energy_out, eps = "1", dump_circuit, dump_hist;
    std::uint64_t shots = 100000, shot_seed = 1;
    bool oracle = false;
    int oracle_nmax = 32;
    auto* energy = app.add_subcommand("energy", "Ewald energy breakdown of one system");
    sys_opts.add(energy, true);
    energy->add_option("--sigma", sigma, "Ewald splitting width (default from the grid)");
    energy->add_option("--kmax", kmax, "k-space cutoff (default M/2)");
    energy->add_option("--backend", backend, "directk | fft | qexact | qsampled");
    energy->add_option("--shots", shots, "K for qsampled");
    energy->add_option("--shot-seed", shot_seed, "Sampler seed for qsampled");
    energy->add_option("--eps-prime", eps, "Boundary dielectric, or inf for tinfoil");
    energy->add_option("--out", energy_out, "CSV output file (default stdout)");
    energy->add_option("--dump-circuit", dump_circuit, "Write the QFT circuit as text");
    energy->add_option("--dump-histogram", dump_hist, "Write the qsampled shot histogram");
    energy->add_flag("--oracle", oracle, "Also report the shell-converged direct sum");
    energy->add_option("--oracle-nmax", oracle_nmax, "Direct-sum image shells");

    SweepOptions breakdown_opts, timing_opts, error_opts;
    auto* breakdown = app.add_subcommand("breakdown", "Ewald term sizes and times over N");
    breakdown_opts.add(breakdown);
    auto* timing = app.add_subcommand("timing", "Classical vs modeled quantum E^L time over N");
    timing_opts.add(timing);
    auto* error = app.add_subcommand("error", "Relative error against the direct sum over N");
    error_opts.add(error);

    std::string plot_in, plot_out;
    auto* plot = app.add_subcommand("plot", "Render a sweep CSV to SVG");
    plot->add_option("--in", plot_in, "Sweep CSV")->required();
    plot->add_option("--out", plot_out, "SVG output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (generate->parsed()) {
            const auto sys = gen_opts.build();
            Output o(gen_out);
            write_system(o.stream(), sys);
        } else if (energy->parsed()) {
            const auto sys = sys_opts.build();
            EwaldParams p = default_params(sys.grid_size(), sys.cell_length());
            if (kmax) {
                p.kspace_cutoff = *kmax;
                p.sigma = std::max(0.3 * sys.cell_length(), 1.35 * sys.cell_length() / *kmax);
                p.real_cutoff = 5.0 * std::sqrt(2.0) * p.sigma;
            }
            if (sigma) {
                p.sigma = *sigma;
                p.real_cutoff = 5.0 * std::sqrt(2.0) * p.sigma;
            }
            p.eps_prime = eps == "inf" || eps == "tinfoil" ? EwaldParams::tinfoil : std::stod(eps);
            const Backend b = parse_backend(backend);
            const auto e = total_energy(sys, p, b, {shots, shot_seed});
            Output o(energy_out);
            o.stream() << energy_csv_header() << energy_csv_row(sys, e);

            if (!dump_circuit.empty()) {
                Output f(dump_circuit);
                qsim::dump_circuit(f.stream(), qsim::build_multidim_qft_circuit(sys.dim(), sys.bits_per_axis()));
            }
            if (!dump_hist.empty()) {
                auto state = encode_charges(sys);
                qsim::apply_qft_multidim(state, sys.dim(), sys.bits_per_axis());
                Output f(dump_hist);
                qsim::dump_histogram(f.stream(), qsim::sample_shots(state, shots, shot_seed));
            }
            if (oracle) {
                const auto ref = converged_direct_sum(sys, {oracle_nmax, DirectSumOptions{}.tolerance});
                std::cerr << "direct sum: " << format_energy(ref.energy)
                          << "  relative error: " << format_double(std::abs(e.e_total - ref.energy) / std::abs(ref.energy), 6)
                          << "  converged: " << (ref.converged ? "yes" : "no") << '\n';
                if (!ref.converged)
                    throw ConvergenceError("direct sum did not converge (relative change " +
                                           format_double(ref.rel_change, 3) + ")");
            }
        } else if (breakdown->parsed()) {
            std::ostringstream csv;
            run_breakdown_sweep(breakdown_opts.build(Experiment::Breakdown), csv);
            breakdown_opts.emit(csv.str());
        } else if (timing->parsed()) {
            std::ostringstream csv;
            run_timing_sweep(timing_opts.build(Experiment::Timing), csv);
            timing_opts.emit(csv.str());
            std::istringstream in(csv.str());
            for (const auto& c : crossover_report(read_csv(in))) std::cerr << format_crossover(c) << '\n';
        } else if (error->parsed()) {
            std::ostringstream csv;
            const bool ok = run_error_sweep(error_opts.build(Experiment::Error), csv);
            error_opts.emit(csv.str());
            if (!ok) throw ConvergenceError("direct-sum oracle did not converge for some rows (see oracle_converged)");
        } else if (plot->parsed()) {
            std::istringstream in(slurp(plot_in));
            const auto svg = render_csv_plot(read_csv(in));
            Output o(plot_out);
            o.stream() << svg;
        }
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: bad numeric argument\n";
        return 2;
    }
    return 0;
}
