#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ewaldqft {

/// Identifier written to output metadata so runs can be replayed.
inline constexpr const char* kRngAlgorithm = "mt19937_64;uniform53;rejection-int;vose-alias";

/// Seedable generator with portable derived distributions. std::mt19937_64
/// is fully specified by the standard; the std:: distributions are not, so
/// integers and doubles are derived here by hand.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound); unbiased by rejection.
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
};

/// Walker/Vose alias table for O(1) categorical sampling.
class AliasTable {
public:
    explicit AliasTable(std::span<const double> weights);

    std::size_t sample(Rng& rng) const;
    std::size_t size() const { return prob_.size(); }

private:
    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
};

} // namespace ewaldqft
