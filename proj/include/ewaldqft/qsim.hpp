#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace ewaldqft::qsim {

using Amplitude = std::complex<double>;

/// Dense n-qubit register. Qubit 0 is the most significant bit of the basis
/// index: basis |b_0 b_1 ... b_{n-1}> has index sum_t b_t 2^(n-1-t).
class Statevector {
public:
    /// |0...0>
    explicit Statevector(int n_qubits);
    Statevector(int n_qubits, std::vector<Amplitude> amplitudes);

    int n_qubits() const { return n_qubits_; }
    std::size_t dimension() const { return amps_.size(); }
    std::span<const Amplitude> amplitudes() const { return amps_; }
    std::span<Amplitude> amplitudes() { return amps_; }
    const Amplitude& operator[](std::size_t i) const { return amps_[i]; }

    double norm_squared() const;
    std::vector<double> probabilities() const;

private:
    int n_qubits_;
    std::vector<Amplitude> amps_;
};

enum class GateKind { H, Phase, ControlledPhase, Swap };

/// One gate of the H / R_n / controlled-R_n / SWAP set.
/// R_n multiplies the |1> amplitude by exp(2 pi i / 2^n); an adjoint gate
/// uses the conjugate phase. For Swap, `control` holds the second qubit.
struct GateOp {
    GateKind kind = GateKind::H;
    int target = 0;
    int control = -1;
    int n = 0;
    bool adjoint = false;

    static GateOp h(int target) { return {GateKind::H, target, -1, 0, false}; }
    static GateOp phase(int n, int target, bool adjoint = false) { return {GateKind::Phase, target, -1, n, adjoint}; }
    static GateOp controlled_phase(int n, int control, int target, bool adjoint = false)
    {
        return {GateKind::ControlledPhase, target, control, n, adjoint};
    }
    static GateOp swap(int a, int b) { return {GateKind::Swap, a, b, 0, false}; }

    /// 2 pi / 2^n with the adjoint sign applied.
    double angle() const;
    GateOp inverse() const;

    friend bool operator==(const GateOp&, const GateOp&) = default;
};

/// Throws ValidationError if the gate does not fit an n-qubit register.
void check_gate(const GateOp& gate, int n_qubits);

class Circuit {
public:
    explicit Circuit(int n_qubits);

    int n_qubits() const { return n_qubits_; }
    std::size_t gate_count() const { return gates_.size(); }
    std::span<const GateOp> gates() const { return gates_; }

    Circuit& add(const GateOp& gate);
    /// Appends `other` with every qubit index shifted by `offset`.
    Circuit& append(const Circuit& other, int offset = 0);
    /// Reversed order, each gate replaced by its adjoint.
    Circuit inverse() const;

private:
    int n_qubits_;
    std::vector<GateOp> gates_;
};

void apply_gate(Statevector& state, const GateOp& gate);
void apply_circuit(Statevector& state, const Circuit& circuit);

/// Textbook QFT on n qubits: for each qubit j, H then controlled-R_{k-j+1}
/// from every later qubit k; then floor(n/2) swaps reversing the bit order.
/// Implements |j> -> 2^(-n/2) sum_k exp(+2 pi i j k / 2^n) |k>.
Circuit build_qft_circuit(int n);

/// d copies of the n-qubit QFT, copy a acting on qubits [a n, (a+1) n).
Circuit build_multidim_qft_circuit(int dim, int bits_per_axis);

/// Applies the d-dimensional QFT in place:
/// beta_s = M^(-d/2) sum_r alpha_r exp(+2 pi i r.s / M), M = 2^bits_per_axis.
void apply_qft_multidim(Statevector& state, int dim, int bits_per_axis);

/// Dense row-major matrix, U[row * 2^n + col] = <row|U|col>, built by
/// running every basis state through the circuit.
std::vector<Amplitude> circuit_unitary(const Circuit& circuit);

struct SparseEntry {
    std::uint64_t index;
    Amplitude amplitude;
};

/// Statevector with exactly the given nonzero amplitudes. With normalize =
/// false the entries must already have unit norm within 1e-12.
Statevector inject_sparse_state(int n_qubits, std::span<const SparseEntry> entries, bool normalize = false);

struct ShotHistogram {
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    std::map<std::uint64_t, std::uint64_t> counts; ///< basis index -> count

    double frequency(std::uint64_t index) const;
};

/// K independent measurements in the computational basis, p_k = |alpha_k|^2.
/// The statevector is not collapsed: every shot measures a fresh copy.
ShotHistogram sample_shots(const Statevector& state, std::uint64_t shots, std::uint64_t seed);

enum class PrepMethod { Mottonen, GleinigHoefler };

struct GateCounts {
    std::uint64_t prep = 0;
    std::uint64_t qft = 0;
    std::uint64_t total = 0; ///< per repetition
    /// Generic-state preparation on log2 M qubits, 8M - 4 log2 M - 9.
    std::uint64_t mottonen_axis = 0;
    /// Same family on the whole d log2 M register: (2^(n+2) - 4n - 4) CNOTs
    /// plus (2^(n+2) - 5) rotations.
    std::uint64_t mottonen_register = 0;
    std::uint64_t gleinig_hoefler = 0; ///< N d log2 M
};

/// Analytic per-repetition gate counts; prep follows `method`
/// (Mottonen -> mottonen_axis). QFT count includes the terminal swaps.
GateCounts gate_count_model(std::uint64_t n_charges, int grid_size, int dim, PrepMethod method, bool include_qft);

/// n(n+1)/2 + floor(n/2)
std::uint64_t qft_gate_count(int n);

/// Lines `H t`, `P n t`, `CP n c t`, `SWAP a b`; adjoint phases as `PDG`/`CPDG`.
void dump_circuit(std::ostream& out, const Circuit& circuit);
/// `basis_index,count` with header.
void dump_histogram(std::ostream& out, const ShotHistogram& histogram);

} // namespace ewaldqft::qsim
