#include "ewaldqft/qsim.hpp"

#include "ewaldqft/errors.hpp"
#include "ewaldqft/rng.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <ostream>
#include <set>

namespace ewaldqft::qsim {

namespace {

constexpr int kMaxQubits = 30;

std::uint64_t bit_of(int qubit, int n_qubits) { return std::uint64_t{1} << (n_qubits - 1 - qubit); }

} // namespace

Statevector::Statevector(int n_qubits) : n_qubits_(n_qubits)
{
    if (n_qubits < 1 || n_qubits > kMaxQubits)
        throw ValidationError("qubit count must be in [1, " + std::to_string(kMaxQubits) + "]");
    amps_.assign(std::size_t{1} << n_qubits, Amplitude{0.0, 0.0});
    amps_[0] = 1.0;
}

Statevector::Statevector(int n_qubits, std::vector<Amplitude> amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes))
{
    if (n_qubits < 1 || n_qubits > kMaxQubits)
        throw ValidationError("qubit count must be in [1, " + std::to_string(kMaxQubits) + "]");
    if (amps_.size() != (std::size_t{1} << n_qubits)) throw ValidationError("amplitude vector length is not 2^n");
}

double Statevector::norm_squared() const
{
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
}

std::vector<double> Statevector::probabilities() const
{
    std::vector<double> p(amps_.size());
    for (std::size_t i = 0; i < amps_.size(); ++i) p[i] = std::norm(amps_[i]);
    return p;
}

double GateOp::angle() const
{
    const double theta = std::ldexp(2.0 * std::numbers::pi, -n);
    return adjoint ? -theta : theta;
}

GateOp GateOp::inverse() const
{
    GateOp g = *this;
    if (kind == GateKind::Phase || kind == GateKind::ControlledPhase) g.adjoint = !adjoint;
    return g;
}

void check_gate(const GateOp& gate, int n_qubits)
{
    auto in_range = [&](int q) { return q >= 0 && q < n_qubits; };
    if (!in_range(gate.target))
        throw ValidationError("gate target " + std::to_string(gate.target) + " out of range for " +
                              std::to_string(n_qubits) + " qubits");
    switch (gate.kind) {
    case GateKind::H:
        break;
    case GateKind::Phase:
        if (gate.n < 1) throw ValidationError("phase gate order must be >= 1");
        break;
    case GateKind::ControlledPhase:
    case GateKind::Swap:
        if (!in_range(gate.control))
            throw ValidationError("gate control " + std::to_string(gate.control) + " out of range");
        if (gate.control == gate.target) throw ValidationError("control and target must differ");
        if (gate.kind == GateKind::ControlledPhase && gate.n < 1)
            throw ValidationError("phase gate order must be >= 1");
        break;
    }
}

Circuit::Circuit(int n_qubits) : n_qubits_(n_qubits)
{
    if (n_qubits < 1) throw ValidationError("circuit needs at least one qubit");
}

Circuit& Circuit::add(const GateOp& gate)
{
    check_gate(gate, n_qubits_);
    gates_.push_back(gate);
    return *this;
}

Circuit& Circuit::append(const Circuit& other, int offset)
{
    for (GateOp g : other.gates_) {
        g.target += offset;
        if (g.control >= 0) g.control += offset;
        add(g);
    }
    return *this;
}

Circuit Circuit::inverse() const
{
    Circuit inv(n_qubits_);
    for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) inv.add(it->inverse());
    return inv;
}

void apply_gate(Statevector& state, const GateOp& gate)
{
    const int n = state.n_qubits();
    check_gate(gate, n);
    auto amps = state.amplitudes();
    const std::uint64_t dim = amps.size();
    const std::uint64_t t = bit_of(gate.target, n);

    switch (gate.kind) {
    case GateKind::H: {
        const double s = std::numbers::sqrt2 / 2.0;
        for (std::uint64_t i = 0; i < dim; ++i) {
            if (i & t) continue;
            const Amplitude a = amps[i];
            const Amplitude b = amps[i | t];
            amps[i] = s * (a + b);
            amps[i | t] = s * (a - b);
        }
        break;
    }
    case GateKind::Phase: {
        const Amplitude f = std::polar(1.0, gate.angle());
        for (std::uint64_t i = 0; i < dim; ++i)
            if (i & t) amps[i] *= f;
        break;
    }
    case GateKind::ControlledPhase: {
        const Amplitude f = std::polar(1.0, gate.angle());
        const std::uint64_t both = t | bit_of(gate.control, n);
        for (std::uint64_t i = 0; i < dim; ++i)
            if ((i & both) == both) amps[i] *= f;
        break;
    }
    case GateKind::Swap: {
        const std::uint64_t c = bit_of(gate.control, n);
        for (std::uint64_t i = 0; i < dim; ++i)
            if ((i & t) && !(i & c)) std::swap(amps[i], amps[(i ^ t) | c]);
        break;
    }
    }
}

void apply_circuit(Statevector& state, const Circuit& circuit)
{
    if (circuit.n_qubits() != state.n_qubits()) throw ValidationError("circuit and state qubit counts differ");
    for (const auto& g : circuit.gates()) apply_gate(state, g);
}

std::uint64_t qft_gate_count(int n)
{
    const auto u = static_cast<std::uint64_t>(n);
    return u * (u + 1) / 2 + u / 2;
}

Circuit build_qft_circuit(int n)
{
    if (n < 1) throw ValidationError("QFT needs at least one qubit");
    Circuit c(n);
    for (int j = 0; j < n; ++j) {
        c.add(GateOp::h(j));
        for (int k = j + 1; k < n; ++k) c.add(GateOp::controlled_phase(k - j + 1, k, j));
    }
    for (int j = 0; j < n / 2; ++j) c.add(GateOp::swap(j, n - 1 - j));
    return c;
}

Circuit build_multidim_qft_circuit(int dim, int bits_per_axis)
{
    if (dim < 1) throw ValidationError("dimension must be >= 1");
    const Circuit axis = build_qft_circuit(bits_per_axis);
    Circuit c(dim * bits_per_axis);
    for (int a = 0; a < dim; ++a) c.append(axis, a * bits_per_axis);
    return c;
}

void apply_qft_multidim(Statevector& state, int dim, int bits_per_axis)
{
    if (dim < 1 || bits_per_axis < 1 || dim * bits_per_axis != state.n_qubits())
        throw ValidationError("qubit partition mismatch: " + std::to_string(state.n_qubits()) + " qubits vs " +
                              std::to_string(dim) + " axes x " + std::to_string(bits_per_axis) + " bits");
    apply_circuit(state, build_multidim_qft_circuit(dim, bits_per_axis));
}

std::vector<Amplitude> circuit_unitary(const Circuit& circuit)
{
    const int n = circuit.n_qubits();
    const std::size_t dim = std::size_t{1} << n;
    std::vector<Amplitude> u(dim * dim);
    for (std::size_t col = 0; col < dim; ++col) {
        std::vector<Amplitude> basis(dim, Amplitude{0.0, 0.0});
        basis[col] = 1.0;
        Statevector s(n, std::move(basis));
        apply_circuit(s, circuit);
        for (std::size_t row = 0; row < dim; ++row) u[row * dim + col] = s[row];
    }
    return u;
}

Statevector inject_sparse_state(int n_qubits, std::span<const SparseEntry> entries, bool normalize)
{
    if (n_qubits < 1 || n_qubits > kMaxQubits) throw ValidationError("qubit count out of range");
    const std::uint64_t dim = std::uint64_t{1} << n_qubits;
    std::set<std::uint64_t> seen;
    double norm2 = 0.0;
    for (const auto& e : entries) {
        if (e.index >= dim) throw ValidationError("basis index " + std::to_string(e.index) + " out of range");
        if (!seen.insert(e.index).second)
            throw ValidationError("duplicate basis index " + std::to_string(e.index));
        norm2 += std::norm(e.amplitude);
    }
    if (!(norm2 > 0.0)) throw ValidationError("sparse state has zero norm");
    double scale = 1.0;
    if (normalize) {
        scale = 1.0 / std::sqrt(norm2);
    } else if (std::abs(norm2 - 1.0) > 1e-12) {
        throw ValidationError("sparse state is not normalized (norm^2 = " + std::to_string(norm2) + ")");
    }
    std::vector<Amplitude> amps(dim, Amplitude{0.0, 0.0});
    for (const auto& e : entries) amps[e.index] = scale * e.amplitude;
    return Statevector(n_qubits, std::move(amps));
}

double ShotHistogram::frequency(std::uint64_t index) const
{
    auto it = counts.find(index);
    if (it == counts.end() || shots == 0) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(shots);
}

ShotHistogram sample_shots(const Statevector& state, std::uint64_t shots, std::uint64_t seed)
{
    if (shots < 1) throw ValidationError("shot count must be >= 1");
    const auto p = state.probabilities();
    const AliasTable table(p);
    Rng rng(seed);
    std::vector<std::uint64_t> dense(p.size(), 0);
    for (std::uint64_t k = 0; k < shots; ++k) ++dense[table.sample(rng)];

    ShotHistogram h;
    h.shots = shots;
    h.seed = seed;
    for (std::size_t i = 0; i < dense.size(); ++i)
        if (dense[i] != 0) h.counts.emplace_hint(h.counts.end(), i, dense[i]);
    return h;
}

GateCounts gate_count_model(std::uint64_t n_charges, int grid_size, int dim, PrepMethod method, bool include_qft)
{
    if (grid_size < 2 || (grid_size & (grid_size - 1)) != 0)
        throw CapabilityError("grid size must be a power of 2 and at least 2");
    if (dim < 1) throw ValidationError("dimension must be >= 1");
    const auto m = static_cast<std::uint64_t>(grid_size);
    const int bits = std::countr_zero(static_cast<unsigned>(grid_size));
    const auto b = static_cast<std::uint64_t>(bits);
    const int reg = dim * bits;
    if (reg > 60) throw CapabilityError("register too wide for gate-count arithmetic");

    GateCounts g;
    g.mottonen_axis = 8 * m - 4 * b - 9;
    const std::uint64_t p = std::uint64_t{1} << (reg + 2);
    g.mottonen_register = (p - 4 * static_cast<std::uint64_t>(reg) - 4) + (p - 5);
    g.gleinig_hoefler = n_charges * static_cast<std::uint64_t>(dim) * b;
    g.prep = method == PrepMethod::Mottonen ? g.mottonen_axis : g.gleinig_hoefler;
    g.qft = include_qft ? static_cast<std::uint64_t>(dim) * qft_gate_count(bits) : 0;
    g.total = g.prep + g.qft;
    return g;
}

void dump_circuit(std::ostream& out, const Circuit& circuit)
{
    for (const auto& g : circuit.gates()) {
        switch (g.kind) {
        case GateKind::H:
            out << "H " << g.target << '\n';
            break;
        case GateKind::Phase:
            out << (g.adjoint ? "PDG " : "P ") << g.n << ' ' << g.target << '\n';
            break;
        case GateKind::ControlledPhase:
            out << (g.adjoint ? "CPDG " : "CP ") << g.n << ' ' << g.control << ' ' << g.target << '\n';
            break;
        case GateKind::Swap:
            out << "SWAP " << g.target << ' ' << g.control << '\n';
            break;
        }
    }
}

void dump_histogram(std::ostream& out, const ShotHistogram& histogram)
{
    out << "basis_index,count\n";
    for (const auto& [index, count] : histogram.counts) out << index << ',' << count << '\n';
}

} // namespace ewaldqft::qsim
