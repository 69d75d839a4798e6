#include "ewaldqft/charge_system.hpp"

#include "ewaldqft/errors.hpp"
#include "ewaldqft/rng.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace ewaldqft {

namespace {

std::int64_t linear_index(const GridPoint& x, int grid_size)
{
    return (static_cast<std::int64_t>(x[0]) * grid_size + x[1]) * grid_size + x[2];
}

Violation violation(ViolationKind kind, std::size_t index, std::string message)
{
    return Violation{kind, index, std::move(message)};
}

} // namespace

ValidationReport validate(int dim, int grid_size, double cell_length, std::span<const Charge> charges)
{
    if (dim != 2 && dim != 3)
        return violation(ViolationKind::BadDimension, 0, "dimension must be 2 or 3, got " + std::to_string(dim));
    if (grid_size < 1 || !std::has_single_bit(static_cast<unsigned>(grid_size)))
        return violation(ViolationKind::BadGridSize, 0,
                         "grid size must be a positive power of 2, got " + std::to_string(grid_size));
    if (!(cell_length > 0.0) || !std::isfinite(cell_length))
        return violation(ViolationKind::BadCellLength, 0, "cell length must be positive and finite");
    if (charges.empty()) return violation(ViolationKind::Empty, 0, "system has no charges");

    std::unordered_set<std::int64_t> seen;
    seen.reserve(charges.size() * 2);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < charges.size(); ++i) {
        const auto& x = charges[i].x;
        for (int a = 0; a < 3; ++a) {
            const int hi = a < dim ? grid_size : 1;
            if (x[a] < 0 || x[a] >= hi) {
                std::ostringstream msg;
                msg << "charge " << i << " coordinate " << a << " = " << x[a] << " outside [0, " << hi << ")";
                return violation(ViolationKind::OutOfRange, i, msg.str());
            }
        }
        if (!std::isfinite(charges[i].q))
            return violation(ViolationKind::OutOfRange, i, "charge " + std::to_string(i) + " is not finite");
        if (!seen.insert(linear_index(x, grid_size)).second)
            return violation(ViolationKind::DuplicatePosition, i,
                             "charge " + std::to_string(i) + " shares its grid point with an earlier charge");
        norm2 += charges[i].q * charges[i].q;
    }
    if (!(norm2 > 0.0)) return violation(ViolationKind::ZeroNorm, 0, "charge norm is zero");
    return std::nullopt;
}

ChargeSystem::ChargeSystem(int dim, int grid_size, double cell_length, std::vector<Charge> charges)
    : dim_(dim), grid_size_(grid_size), bits_(0), length_(cell_length), charges_(std::move(charges))
{
    if (auto report = validate(dim_, grid_size_, length_, charges_)) throw ValidationError(report->message);
    bits_ = std::countr_zero(static_cast<unsigned>(grid_size_));
}

std::array<double, 3> ChargeSystem::position(std::size_t i) const
{
    const double h = spacing();
    const auto& x = charges_[i].x;
    return {h * x[0], h * x[1], h * x[2]};
}

double ChargeSystem::net_charge() const
{
    double s = 0.0;
    for (const auto& c : charges_) s += c.q;
    return s;
}

double ChargeSystem::sum_q2() const
{
    double s = 0.0;
    for (const auto& c : charges_) s += c.q * c.q;
    return s;
}

double ChargeSystem::charge_norm() const { return std::sqrt(sum_q2()); }

std::array<double, 3> ChargeSystem::dipole() const
{
    std::array<double, 3> d{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < charges_.size(); ++i) {
        const auto r = position(i);
        for (int a = 0; a < 3; ++a) d[a] += charges_[i].q * r[a];
    }
    return d;
}

ChargeSystem ChargeSystem::scaled(double factor) const
{
    auto copy = charges_;
    for (auto& c : copy) c.q *= factor;
    return ChargeSystem(dim_, grid_size_, length_, std::move(copy));
}

ChargeSystem ChargeSystem::shifted(const GridPoint& offset) const
{
    auto copy = charges_;
    for (auto& c : copy)
        for (int a = 0; a < dim_; ++a) c.x[a] = ((c.x[a] + offset[a]) % grid_size_ + grid_size_) % grid_size_;
    return ChargeSystem(dim_, grid_size_, length_, std::move(copy));
}

bool operator==(const ChargeSystem& a, const ChargeSystem& b)
{
    if (a.dim_ != b.dim_ || a.grid_size_ != b.grid_size_ || a.length_ != b.length_) return false;
    if (a.charges_.size() != b.charges_.size()) return false;
    for (std::size_t i = 0; i < a.charges_.size(); ++i)
        if (a.charges_[i].q != b.charges_[i].q || !(a.charges_[i].x == b.charges_[i].x)) return false;
    return true;
}

namespace {

GridPoint decode_site(std::uint64_t site, int grid_size, int dim)
{
    GridPoint x;
    for (int a = dim - 1; a >= 0; --a) {
        x[a] = static_cast<int>(site % grid_size);
        site /= grid_size;
    }
    return x;
}

/// Draws `count` distinct sites from [offset, offset + range) of the
/// row-major site numbering.
void draw_distinct(Rng& rng, std::uint64_t offset, std::uint64_t range, std::size_t count, double q, int grid_size,
                   int dim, std::unordered_set<std::uint64_t>& used, std::vector<Charge>& out)
{
    for (std::size_t k = 0; k < count; ++k) {
        for (;;) {
            const std::uint64_t site = offset + rng.below(range);
            if (used.insert(site).second) {
                out.push_back(Charge{q, decode_site(site, grid_size, dim)});
                break;
            }
        }
    }
}

} // namespace

ChargeSystem generate_configuration(const ConfigSpec& spec, int grid_size, int dim, double cell_length)
{
    if (dim != 2 && dim != 3) throw ValidationError("dimension must be 2 or 3");
    if (grid_size < 2 || !std::has_single_bit(static_cast<unsigned>(grid_size)))
        throw ValidationError("grid size must be a power of 2 and at least 2");
    if (spec.count == 0) throw ValidationError("configuration needs at least one charge");
    if (!(spec.magnitude > 0.0)) throw ValidationError("charge magnitude must be positive");

    std::uint64_t sites = 1;
    for (int a = 0; a < dim; ++a) sites *= static_cast<std::uint64_t>(grid_size);
    if (spec.count > sites)
        throw ValidationError("capacity: " + std::to_string(spec.count) + " charges exceed " + std::to_string(sites) +
                              " grid points");

    const std::size_t n_pos = (spec.count + 1) / 2;
    const std::size_t n_neg = spec.count / 2;
    const double q = spec.magnitude;

    Rng rng(spec.seed);
    std::unordered_set<std::uint64_t> used;
    std::vector<Charge> charges;
    charges.reserve(spec.count);

    switch (spec.kind) {
    case ConfigKind::Mixed:
        draw_distinct(rng, 0, sites, n_pos, +q, grid_size, dim, used, charges);
        draw_distinct(rng, 0, sites, n_neg, -q, grid_size, dim, used, charges);
        break;
    case ConfigKind::Separated: {
        if (spec.count % 2 != 0) throw ValidationError("parity: separated configuration needs an even charge count");
        // x is the most significant axis of the site numbering, so each half
        // cell is one contiguous block.
        const std::uint64_t half = sites / 2;
        if (n_pos > half)
            throw ValidationError("capacity: " + std::to_string(n_pos) + " charges exceed half-cell capacity " +
                                  std::to_string(half));
        draw_distinct(rng, 0, half, n_pos, +q, grid_size, dim, used, charges);
        draw_distinct(rng, half, half, n_neg, -q, grid_size, dim, used, charges);
        break;
    }
    }
    return ChargeSystem(dim, grid_size, cell_length, std::move(charges));
}

ChargeSystem rocksalt_lattice(int grid_size, int dim, double cell_length)
{
    if (grid_size % 2 != 0) throw ValidationError("parity: rocksalt lattice needs an even grid size");
    if (dim != 2 && dim != 3) throw ValidationError("dimension must be 2 or 3");
    std::vector<Charge> charges;
    const int nz = dim == 3 ? grid_size : 1;
    for (int x = 0; x < grid_size; ++x)
        for (int y = 0; y < grid_size; ++y)
            for (int z = 0; z < nz; ++z)
                charges.push_back(Charge{(x + y + z) % 2 == 0 ? 1.0 : -1.0, GridPoint{{x, y, z}}});
    return ChargeSystem(dim, grid_size, cell_length, std::move(charges));
}

std::string to_string(ConfigKind kind) { return kind == ConfigKind::Mixed ? "mixed" : "separated"; }

ConfigKind parse_config_kind(const std::string& text)
{
    if (text == "mixed") return ConfigKind::Mixed;
    if (text == "separated") return ConfigKind::Separated;
    throw ValidationError("unknown configuration kind '" + text + "'");
}

void write_system(std::ostream& out, const ChargeSystem& system)
{
    char buf[64];
    const auto len = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    const std::string l = len(system.cell_length());
    out << system.dim() << ' ' << system.grid_size() << ' ' << l << ' ' << l << ' ' << l << ' ' << system.size()
        << '\n';
    for (const auto& c : system.charges()) {
        out << len(c.q) << ' ' << c.x[0] << ' ' << c.x[1];
        if (system.dim() == 3) out << ' ' << c.x[2];
        out << '\n';
    }
}

ChargeSystem read_system(std::istream& in)
{
    int dim = 0, grid = 0;
    double lx = 0, ly = 0, lz = 0;
    std::size_t n = 0;
    if (!(in >> dim >> grid >> lx >> ly >> lz >> n)) throw ValidationError("malformed charge-system header");
    if (lx != ly || ly != lz) throw ValidationError("only cubic cells are supported (Lx = Ly = Lz)");
    if (dim != 2 && dim != 3) throw ValidationError("dimension must be 2 or 3");
    std::vector<Charge> charges(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& c = charges[i];
        if (!(in >> c.q >> c.x[0] >> c.x[1])) throw ValidationError("malformed charge line " + std::to_string(i));
        if (dim == 3 && !(in >> c.x[2])) throw ValidationError("malformed charge line " + std::to_string(i));
    }
    return ChargeSystem(dim, grid, lx, std::move(charges));
}

} // namespace ewaldqft
