#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ewaldqft {

/// Integer grid coordinates. For d = 2 the z component is always 0.
struct GridPoint {
    std::array<int, 3> c{0, 0, 0};

    int operator[](std::size_t axis) const { return c[axis]; }
    int& operator[](std::size_t axis) { return c[axis]; }
    friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

struct Charge {
    double q = 0.0;
    GridPoint x;
};

enum class ViolationKind {
    BadDimension,
    BadGridSize,
    BadCellLength,
    Empty,
    OutOfRange,
    DuplicatePosition,
    ZeroNorm,
};

struct Violation {
    ViolationKind kind;
    std::size_t index = 0; ///< offending charge (second of a duplicate pair)
    std::string message;
};

/// Empty optional means the input is valid.
using ValidationReport = std::optional<Violation>;

/// Checks every ChargeSystem invariant and reports the first violation.
/// Grid size must be a power of two.
ValidationReport validate(int dim, int grid_size, double cell_length, std::span<const Charge> charges);

/// Point charges on a cubic M^d grid inside a periodic cubic cell of side L.
/// A d = 2 system is a single plane (z = 0) of a 3-d periodic cube; see README.
/// Immutable once constructed; construction validates and throws ValidationError.
class ChargeSystem {
public:
    ChargeSystem(int dim, int grid_size, double cell_length, std::vector<Charge> charges);

    int dim() const { return dim_; }
    int grid_size() const { return grid_size_; }
    int bits_per_axis() const { return bits_; }
    double cell_length() const { return length_; }
    double spacing() const { return length_ / grid_size_; }
    double volume() const { return length_ * length_ * length_; }
    std::size_t size() const { return charges_.size(); }
    std::span<const Charge> charges() const { return charges_; }
    const Charge& operator[](std::size_t i) const { return charges_[i]; }

    /// Cartesian position r = L x / M.
    std::array<double, 3> position(std::size_t i) const;
    double net_charge() const;
    double sum_q2() const;
    double charge_norm() const;
    std::array<double, 3> dipole() const;

    /// Same positions, every charge multiplied by factor.
    ChargeSystem scaled(double factor) const;
    /// Cyclic shift of all coordinates by offset (mod M) on the active axes.
    ChargeSystem shifted(const GridPoint& offset) const;

    friend bool operator==(const ChargeSystem&, const ChargeSystem&);

private:
    int dim_;
    int grid_size_;
    int bits_;
    double length_;
    std::vector<Charge> charges_;
};

enum class ConfigKind { Mixed, Separated };

struct ConfigSpec {
    ConfigKind kind = ConfigKind::Mixed;
    std::size_t count = 2;
    std::uint64_t seed = 1;
    double magnitude = 1.0;
};

/// Mixed: ceil(N/2) charges +|q| and floor(N/2) charges -|q| on distinct
/// uniformly random grid points. Separated: positives in the half-cell
/// x < M/2, negatives in x >= M/2. Pure function of (spec, M, d, L).
ChargeSystem generate_configuration(const ConfigSpec& spec, int grid_size, int dim, double cell_length = 1.0);

/// Alternating +-1 at every grid point with sign (-1)^(x+y+z).
ChargeSystem rocksalt_lattice(int grid_size, int dim = 3, double cell_length = 1.0);

std::string to_string(ConfigKind kind);
ConfigKind parse_config_kind(const std::string& text);

/// Text format: header `d M Lx Ly Lz N`, then N lines `q x y [z]`.
void write_system(std::ostream& out, const ChargeSystem& system);
ChargeSystem read_system(std::istream& in);

} // namespace ewaldqft
