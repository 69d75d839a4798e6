#pragma once

#include "ewaldqft/charge_system.hpp"
#include "ewaldqft/csv.hpp"
#include "ewaldqft/direct_sum.hpp"
#include "ewaldqft/ewald.hpp"
#include "ewaldqft/qsim.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ewaldqft {

enum class Experiment { Breakdown, Timing, Error };

std::string to_string(Experiment experiment);
Experiment parse_experiment(const std::string& text);

/// One grid of a sweep. The error experiment runs two of them.
struct GridSpec {
    int dim = 3;
    int grid_size = 32;
    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct SweepSpec {
    Experiment experiment = Experiment::Breakdown;
    std::vector<std::size_t> n_values;
    std::vector<GridSpec> grids;
    double cell_length = 1.0;
    std::vector<ConfigKind> kinds;
    std::vector<std::uint64_t> seeds;
    std::optional<double> sigma; ///< default_params when unset
    std::optional<int> kspace_cutoff;
    double eps_prime = 1.0;
    std::vector<std::uint64_t> shots; ///< K values
    int repeats = 5;
    int warmup = 1;
    double t_q1 = 5.0e-8; ///< seconds per hardware gate
    qsim::PrepMethod prep = qsim::PrepMethod::Mottonen;
    DirectSumOptions oracle;
    unsigned workers = 0; ///< 0: hardware concurrency. Timing always runs serially.

    EwaldParams params_for(const GridSpec& grid) const;
};

/// Defaults reproducing the three experiments at desk scale.
SweepSpec default_spec(Experiment experiment);

/// Throws ValidationError (N > M^d, repeats < 1, empty lists, ...).
void check_spec(const SweepSpec& spec);

/// `key = value` lines, `#` comments. Lists are comma separated. Keys:
/// experiment n dim m grids kind seeds sigma kmax eps_prime shots repeats
/// warmup tq1_ns prep oracle_nmax oracle_tol workers cell_length.
/// Unset keys keep the values already in `spec`.
void apply_config(SweepSpec& spec, std::istream& in);
void apply_config_entry(SweepSpec& spec, const std::string& key, const std::string& value);

/// Per-gate emulator time, measured on a fixed circuit of `gates` gates
/// (H and controlled-phase, cycled over the register) at the given width.
double measure_emulator_gate_time(int n_qubits, int gates = 1000, int repeats = 5);

struct TimingModel {
    double t_q1 = 5.0e-8;
    double t_em1 = 0.0; ///< seconds per emulated gate, measured
    int n_qubits = 0;
    int calibration_gates = 1000;

    /// T_q = T_em t_q1 / t_em1. Throws if t_em1 was never measured.
    double hardware_time(double t_em) const;
};

/// Each writes the full CSV (schema-version line, meta lines, header, rows).
void run_breakdown_sweep(const SweepSpec& spec, std::ostream& out);
void run_timing_sweep(const SweepSpec& spec, std::ostream& out);
/// Returns false when some oracle row did not converge.
bool run_error_sweep(const SweepSpec& spec, std::ostream& out);

struct Crossover {
    std::string model;      ///< quantum column compared against classical
    std::optional<double> n_star; ///< unset: quantum never stays below classical
    bool below_everywhere = false;
};

/// Smallest swept N from which the quantum mean time stays below the
/// classical GridFFT mean time, for both T_q and T_q'. Uses only the CSV.
std::vector<Crossover> crossover_report(const CsvTable& timing);
std::string format_crossover(const Crossover& c);

/// Schema check by experiment; throws ValidationError naming the first
/// missing column or wrong schema version.
void check_schema(const CsvTable& table, Experiment experiment);
Experiment detect_experiment(const CsvTable& table);

} // namespace ewaldqft
