#include "ewaldqft/rng.hpp"

#include "ewaldqft/errors.hpp"

namespace ewaldqft {

std::uint64_t Rng::below(std::uint64_t bound)
{
    if (bound == 0) throw ValidationError("Rng::below: empty range");
    // Largest multiple of bound representable; values above it are redrawn.
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    for (;;) {
        const std::uint64_t v = engine_();
        if (v < limit) return v % bound;
    }
}

AliasTable::AliasTable(std::span<const double> weights)
    : prob_(weights.size(), 0.0), alias_(weights.size(), 0)
{
    const std::size_t n = weights.size();
    if (n == 0) throw ValidationError("AliasTable: no categories");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw ValidationError("AliasTable: negative or NaN weight");
        total += w;
    }
    if (!(total > 0.0)) throw ValidationError("AliasTable: zero total weight");

    std::vector<double> scaled(n);
    std::vector<std::size_t> small, large;
    small.reserve(n);
    large.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = weights[i] * static_cast<double>(n) / total;
        (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
        const std::size_t s = small.back();
        small.pop_back();
        const std::size_t l = large.back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    // Leftovers are 1 up to rounding. A zero-weight leftover must never be
    // returned, so it points at the heaviest category instead.
    std::size_t heaviest = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (weights[i] > weights[heaviest]) heaviest = i;
    for (std::size_t i : large) { prob_[i] = 1.0; alias_[i] = i; }
    for (std::size_t i : small) {
        prob_[i] = weights[i] > 0.0 ? 1.0 : 0.0;
        alias_[i] = weights[i] > 0.0 ? i : heaviest;
    }
}

std::size_t AliasTable::sample(Rng& rng) const
{
    const double u = rng.uniform() * static_cast<double>(prob_.size());
    auto column = static_cast<std::size_t>(u);
    if (column >= prob_.size()) column = prob_.size() - 1;
    const double frac = u - static_cast<double>(column);
    return frac < prob_[column] ? column : alias_[column];
}

} // namespace ewaldqft
