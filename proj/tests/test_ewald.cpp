#include "ewaldqft/charge_system.hpp"
#include "ewaldqft/csv.hpp"
#include "ewaldqft/direct_sum.hpp"
#include "ewaldqft/errors.hpp"
#include "ewaldqft/ewald.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

using namespace ewaldqft;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

/// Term-by-term reciprocal sum with complex exponentials of the Cartesian
/// positions. m runs over [lo, kmax] on the in-plane axes and, for d = 2,
/// over [-kmax, kmax] along z.
double naive_reciprocal(const ChargeSystem& s, double sigma, int kmax, int lo)
{
    const double L = s.cell_length();
    const bool planar = s.dim() == 2;
    double sum = 0.0;
    for (int mx = lo; mx <= kmax; ++mx)
        for (int my = lo; my <= kmax; ++my)
            for (int mz = planar ? -kmax : lo; mz <= kmax; ++mz) {
                if (mx == 0 && my == 0 && mz == 0) continue;
                const double kx = 2 * kPi * mx / L, ky = 2 * kPi * my / L, kz = 2 * kPi * mz / L;
                const double k2 = kx * kx + ky * ky + kz * kz;
                std::complex<double> S = 0.0;
                for (std::size_t j = 0; j < s.size(); ++j) {
                    const auto r = s.position(j);
                    S += s[j].q * std::polar(1.0, kx * r[0] + ky * r[1] + kz * r[2]);
                }
                sum += std::exp(-sigma * sigma * k2 / 2) / k2 * std::norm(S);
            }
    return 2 * kPi / s.volume() * sum;
}

/// 1/2 sum over all (i, j, n) with 0 < |r_ij + nL| <= rc of q_i q_j erfc(r / (sqrt2 sigma)) / r.
double naive_real_space(const ChargeSystem& s, double sigma, double rc, int images)
{
    const double L = s.cell_length();
    double e = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.size(); ++j) {
            const auto ri = s.position(i), rj = s.position(j);
            for (int a = -images; a <= images; ++a)
                for (int b = -images; b <= images; ++b)
                    for (int c = -images; c <= images; ++c) {
                        const double dx = rj[0] - ri[0] + a * L, dy = rj[1] - ri[1] + b * L,
                                     dz = rj[2] - ri[2] + c * L;
                        const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
                        if (r == 0.0 || r > rc) continue;
                        e += 0.5 * s[i].q * s[j].q * std::erfc(r / (std::sqrt(2.0) * sigma)) / r;
                    }
        }
    return e;
}

EwaldParams params(double sigma, double rc, int kmax, double eps = 1.0)
{
    EwaldParams p;
    p.sigma = sigma;
    p.real_cutoff = rc;
    p.kspace_cutoff = kmax;
    p.eps_prime = eps;
    return p;
}

} // namespace

TEST_SUITE("ewald") {

TEST_CASE("self energy closed form")
{
    ChargeSystem one(3, 4, 1.0, {{1.0, {{0, 0, 0}}}});
    CHECK(self_energy(one, params(1.0, 0.5, 1)) == doctest::Approx(-0.3989422804014327).epsilon(1e-15));
    auto s = generate_configuration({ConfigKind::Mixed, 10, 3, 1.0}, 8, 3);
    const auto p = params(0.2, 0.5, 2);
    CHECK(self_energy(s.scaled(2.0), p) == 4.0 * self_energy(s, p));
    CHECK(self_energy(s, p) < 0.0);
}

TEST_CASE("dipole energy")
{
    ChargeSystem pair(3, 4, 1.0, {{1.0, {{0, 0, 0}}}, {-1.0, {{1, 0, 0}}}});
    CHECK(dipole_energy(pair, params(0.3, 0.5, 2)) == doctest::Approx(2 * kPi / 3.0 * (0.25 * 0.25)).epsilon(1e-14));
    CHECK(dipole_energy(pair, params(0.3, 0.5, 2, EwaldParams::tinfoil)) == 0.0);

    ChargeSystem centro(3, 4, 1.0, {{1.0, {{1, 0, 0}}}, {1.0, {{3, 0, 0}}}, {-2.0, {{2, 0, 0}}}});
    CHECK(dipole_energy(centro, params(0.3, 0.5, 2)) == doctest::Approx(0.0));
    CHECK_THROWS_AS(dipole_energy(pair, params(0.3, 0.5, 2, 0.5)), ValidationError);
}

TEST_CASE("reciprocal sum of a pair matches a hand-enumerated series")
{
    // +1 at the origin, -1 at L/4 on x, k_max = 1. |S|^2 = 2 - 2 cos(pi m_x / 2)
    // is 2 for m_x = +-1 and 0 otherwise; those 18 wavevectors have
    // |m|^2 = 1 (2 of them), 2 (8) and 3 (8).
    const double sigma = 0.3;
    auto w = [&](double m2) {
        const double k2 = 4 * kPi * kPi * m2;
        return std::exp(-sigma * sigma * k2 / 2) / k2;
    };
    const double expected = 2 * kPi * 2.0 * (2 * w(1) + 8 * w(2) + 8 * w(3));
    ChargeSystem pair3(3, 4, 1.0, {{1.0, {{0, 0, 0}}}, {-1.0, {{1, 0, 0}}}});
    CHECK(reciprocal_energy_direct(pair3, params(sigma, 0.5, 1)) == doctest::Approx(expected).epsilon(1e-14));
    // The planar system sits at z = 0 of the same periodic cube.
    ChargeSystem pair2(2, 4, 1.0, {{1.0, {{0, 0, 0}}}, {-1.0, {{1, 0, 0}}}});
    CHECK(reciprocal_energy_direct(pair2, params(sigma, 0.5, 1)) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("single unit charge has a unit structure factor")
{
    ChargeSystem one(3, 8, 1.0, {{1.0, {{3, 5, 1}}}});
    const double sigma = 0.25;
    const int kmax = 3;
    double sum = 0.0;
    for (int a = -kmax; a <= kmax; ++a)
        for (int b = -kmax; b <= kmax; ++b)
            for (int c = -kmax; c <= kmax; ++c) {
                if (a == 0 && b == 0 && c == 0) continue;
                const double k2 = 4 * kPi * kPi * (a * a + b * b + c * c);
                sum += std::exp(-sigma * sigma * k2 / 2) / k2;
            }
    CHECK(reciprocal_energy_direct(one, params(sigma, 0.5, kmax)) == doctest::Approx(2 * kPi * sum).epsilon(1e-13));
    CHECK(reciprocal_energy_fft(one, params(sigma, 0.5, kmax)) == doctest::Approx(2 * kPi * sum).epsilon(1e-13));
}

TEST_CASE("direct reciprocal sum matches the naive complex evaluation")
{
    for (int dim : {2, 3}) {
        for (std::uint64_t seed = 1; seed <= 4; ++seed) {
            auto s = generate_configuration({ConfigKind::Mixed, 12, seed, 1.0}, 8, dim, 1.3);
            // Interior cutoff, then the Nyquist case where -M/2 aliases +M/2.
            CHECK(rel(reciprocal_energy_direct(s, params(0.2, 0.6, 3)), naive_reciprocal(s, 0.2, 3, -3)) < 1e-12);
            CHECK(rel(reciprocal_energy_direct(s, params(0.2, 0.6, 4)), naive_reciprocal(s, 0.2, 4, -3)) < 1e-12);
        }
    }
}

TEST_CASE("FFT backend agrees with the direct sum")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto s3 = generate_configuration({ConfigKind::Mixed, 32, seed, 1.0}, 16, 3);
        auto p = default_params(16, 1.0);
        CHECK(rel(reciprocal_energy_fft(s3, p), reciprocal_energy_direct(s3, p)) < 1e-12);
        p.kspace_cutoff = 5;
        CHECK(rel(reciprocal_energy_fft(s3, p), reciprocal_energy_direct(s3, p)) < 1e-12);

        auto s2 = generate_configuration({ConfigKind::Separated, 32, seed, 1.0}, 16, 2, 2.0);
        auto q = default_params(16, 2.0);
        CHECK(rel(reciprocal_energy_fft(s2, q), reciprocal_energy_direct(s2, q)) < 1e-12);
    }
}

TEST_CASE("FFT backend capability limits")
{
    auto s = generate_configuration({ConfigKind::Mixed, 8, 1, 1.0}, 8, 3);
    auto p = params(0.3, 1.0, 5);
    CHECK_THROWS_AS(reciprocal_energy_fft(s, p), CapabilityError);
    CHECK_NOTHROW(reciprocal_energy_direct(s, p));
}

TEST_CASE("real-space sum matches the naive image loop")
{
    for (int dim : {2, 3}) {
        auto s = generate_configuration({ConfigKind::Mixed, 10, 11, 1.0}, 8, dim);
        for (double sigma : {0.1, 0.3}) {
            const double rc = 5 * std::sqrt(2.0) * sigma;
            CHECK(rel(real_space_energy(s, params(sigma, rc, 4)), naive_real_space(s, sigma, rc, 4)) < 1e-10);
        }
    }
}

TEST_CASE("real-space pair beyond erfc(6) is negligible")
{
    ChargeSystem s(3, 4, 2.0, {{1.0, {{0, 0, 0}}}, {-1.0, {{1, 0, 0}}}});
    const double r = 0.5;
    const double sigma = r / (6 * std::sqrt(2.0));
    EwaldParams p = params(sigma, 0.6, 2);
    CHECK(std::abs(real_space_energy(s, p)) < 1e-16 / r);
}

TEST_CASE("wide sigma recovers the bare in-range pair sum")
{
    ChargeSystem s(3, 8, 1.0, {{1.0, {{0, 0, 0}}}, {-1.0, {{1, 0, 0}}}, {1.0, {{1, 1, 0}}}});
    // Pairs at 0.125, 0.125 and 0.125*sqrt2; every image is beyond r_c.
    const double bare = -1 / 0.125 - 1 / 0.125 + 1 / (0.125 * std::sqrt(2.0));
    EwaldParams p = params(1e10, 0.3, 1);
    CHECK(real_space_energy(s, p) == doctest::Approx(bare).epsilon(1e-9));
}

TEST_CASE("minimum-image mode")
{
    auto s = generate_configuration({ConfigKind::Mixed, 20, 2, 1.0}, 8, 3);
    // r_c below L/2 so no displacement ties with its opposite image.
    EwaldParams p = params(0.08, 0.45, 4);
    p.real_space = RealSpaceSum::MinimumImage;
    EwaldParams q = p;
    q.real_space = RealSpaceSum::ImageShells;
    CHECK(rel(real_space_energy(s, p), real_space_energy(s, q)) < 1e-14);
    p.real_cutoff = 0.6;
    CHECK_THROWS_AS(real_space_energy(s, p), ValidationError);
}

TEST_CASE("breakdown sums exactly and records metadata")
{
    auto s = generate_configuration({ConfigKind::Mixed, 20, 2, 1.0}, 8, 3);
    for (Backend b : {Backend::DirectK, Backend::GridFFT, Backend::QuantumExact, Backend::QuantumSampled}) {
        auto e = total_energy(s, default_params(8, 1.0), b, {1000, 3});
        CHECK(e.e_total == e.e_short + e.e_long + e.e_self + e.e_dip);
        CHECK(e.backend == b);
        CHECK(e.shots == (b == Backend::QuantumSampled ? 1000u : 0u));
        CHECK(e.wall_ns > 0);
    }
}

TEST_CASE("charge scaling multiplies every term by c^2")
{
    auto s = generate_configuration({ConfigKind::Mixed, 24, 8, 1.0}, 8, 3);
    const auto p = default_params(8, 1.0);
    const auto a = total_energy(s, p, Backend::GridFFT);
    const auto b = total_energy(s.scaled(2.0), p, Backend::GridFFT);
    CHECK(b.e_short == 4 * a.e_short);
    CHECK(b.e_long == 4 * a.e_long);
    CHECK(b.e_self == 4 * a.e_self);
    CHECK(b.e_dip == 4 * a.e_dip);
    const auto c = total_energy(s.scaled(3.0), p, Backend::GridFFT);
    CHECK(rel(c.e_short, 9 * a.e_short) < 1e-13);
    CHECK(rel(c.e_long, 9 * a.e_long) < 1e-13);
    CHECK(rel(c.e_total, 9 * a.e_total) < 1e-13);
}

TEST_CASE("total energy is translation invariant under tinfoil boundaries")
{
    for (int dim : {2, 3}) {
        auto s = generate_configuration({ConfigKind::Mixed, 30, 5, 1.0}, 8, dim);
        auto p = default_params(8, 1.0);
        p.eps_prime = EwaldParams::tinfoil;
        const double e0 = total_energy(s, p, Backend::GridFFT).e_total;
        for (auto off : {GridPoint{{1, 0, 0}}, GridPoint{{3, 5, 7}}, GridPoint{{7, 7, 7}}})
            CHECK(rel(total_energy(s.shifted(off), p, Backend::GridFFT).e_total, e0) < 1e-10);
    }
}

TEST_CASE("sigma invariance at converged cutoffs")
{
    auto s = generate_configuration({ConfigKind::Mixed, 40, 4, 1.0}, 16, 3);
    const auto p0 = default_params(16, 1.0);
    const auto e0 = total_energy(s, p0, Backend::GridFFT);
    for (double f : {0.8, 1.2}) {
        auto p = with_sigma(p0, f * p0.sigma);
        p.real_cutoff = 5 * std::sqrt(2.0) * p.sigma;
        const auto e = total_energy(s, p, Backend::GridFFT);
        CHECK(rel(e.e_total, e0.e_total) < 1e-4);
        CHECK(rel(e.e_long, e0.e_long) > 1e-2);
        CHECK(rel(e.e_self, e0.e_self) > 1e-2);
    }
}

TEST_CASE("default parameters")
{
    const auto p = default_params(16, 2.0);
    CHECK(p.kspace_cutoff == 8);
    CHECK(p.sigma == doctest::Approx(0.6));
    CHECK(p.real_cutoff == doctest::Approx(5 * std::sqrt(2.0) * 0.6));
    CHECK(std::erfc(p.real_cutoff / (std::sqrt(2.0) * p.sigma)) < 1e-11);
    const double k = 2 * kPi * p.kspace_cutoff / 2.0;
    CHECK(std::exp(-p.sigma * p.sigma * k * k / 2) < 1e-15);
    CHECK(p.eps_prime == 1.0);

    auto s = generate_configuration({ConfigKind::Mixed, 4, 1, 1.0}, 4, 3);
    CHECK_THROWS_AS(check_params(with_sigma(p, 0.0), s), ValidationError);
    EwaldParams bad = p;
    bad.kspace_cutoff = 0;
    CHECK_THROWS_AS(check_params(bad, s), ValidationError);
}

TEST_CASE("Ewald total matches the converged direct sum")
{
    for (int dim : {2, 3}) {
        const int m = dim == 3 ? 16 : 32;
        for (std::uint64_t seed : {1u, 2u}) {
            auto s = generate_configuration({ConfigKind::Mixed, 64, seed, 1.0}, m, dim);
            const auto ref = converged_direct_sum(s);
            CHECK(rel(total_energy(s, default_params(m, 1.0), Backend::GridFFT).e_total, ref.energy) < 1e-5);
        }
    }
}

TEST_CASE("rocksalt energy per charge reproduces the Madelung constant")
{
    // -alpha / (2a) per charge with nearest-neighbour distance a = L / M.
    const double alpha = 1.747564594633182;
    auto r = rocksalt_lattice(4);
    const double per = total_energy(r, default_params(4, 1.0), Backend::GridFFT).e_total / 64;
    CHECK(rel(per, -alpha / (2 * 0.25)) < 1e-6);
}

TEST_CASE("energy CSV row")
{
    auto s = generate_configuration({ConfigKind::Mixed, 6, 2, 1.0}, 4, 2);
    const auto e = total_energy(s, default_params(4, 1.0), Backend::DirectK);
    std::istringstream in(energy_csv_header() + energy_csv_row(s, e));
    const auto t = read_csv(in);
    CHECK(t.meta.at("schema-version") == "1");
    CHECK(t.columns.size() == 12);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.text(0, "backend") == "directk");
    CHECK(t.number(0, "e_total") == e.e_total);
    CHECK(t.number(0, "e_long") == e.e_long);
}

TEST_CASE("backend names")
{
    for (Backend b : {Backend::DirectK, Backend::GridFFT, Backend::QuantumExact, Backend::QuantumSampled})
        CHECK(parse_backend(to_string(b)) == b);
    CHECK_THROWS_AS(parse_backend("pme"), ValidationError);
}

}
