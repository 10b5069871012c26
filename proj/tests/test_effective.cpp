#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "sopsim/effective.hpp"
#include "sopsim/spectrum.hpp"

using namespace sopsim;

namespace {

// Random spec with K+1 distinct values and exact multiplicity sum 2^n.
spectrum_spec random_spec(std::mt19937_64& gen) {
    std::uniform_int_distribution<int> ksize(2, 17);
    std::uniform_real_distribution<double> val(0.0, 3.0);
    std::uniform_real_distribution<double> scale(0.5, 4.0);

    spectrum_spec spec;
    spec.n = 10;
    const int classes = ksize(gen);
    std::vector<double> vals(classes);
    for (auto& v : vals) v = val(gen);
    std::sort(vals.begin(), vals.end());
    for (int j = 1; j < classes; ++j)
        if (vals[j] - vals[j - 1] < 1e-3) vals[j] = vals[j - 1] + 1e-3;
    spec.values = vals;

    long remaining = (1L << spec.n) - classes;
    for (int j = 0; j < classes; ++j) {
        long extra = (j + 1 == classes) ? remaining
                                        : std::uniform_int_distribution<long>(
                                              0, remaining / (classes - j))(gen);
        spec.multiplicities.push_back(mpz_class(1 + extra));
        remaining -= extra;
    }
    spec.driver_scale = scale(gen);
    spec.offset = val(gen) - 1.5;
    return spec;
}

// H x with H = s*diag(f) - (1-s)*E0*vv^T
std::vector<double> apply_h(const effective_hamiltonian& h, const std::vector<double>& x) {
    double dot = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) dot += h.v[j] * x[j];
    std::vector<double> y(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
        y[j] = h.diag[j] * x[j] - h.rank1_weight * h.v[j] * dot;
    return y;
}

} // namespace

TEST_CASE("effective builder fills the pieces") {
    const auto vs = validate_spectrum(rem_spectrum(8));
    const auto h = build_effective(vs, 0.25);
    REQUIRE(h.diag.size() == 9);
    CHECK(h.s == 0.25);
    CHECK(h.diag[3] == doctest::Approx(0.25 * 3.0).epsilon(1e-15));
    CHECK(h.rank1_weight == doctest::Approx(0.75 * 8.0).epsilon(1e-15));
    double norm = 0.0;
    for (double v : h.v) norm += v * v;
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("dense and secular routes agree on random spectra") {
    std::mt19937_64 gen(2026);
    for (int trial = 0; trial < 100; ++trial) {
        const auto vs = validate_spectrum(random_spec(gen));
        const double s = std::uniform_real_distribution<double>(0.02, 0.98)(gen);
        const auto dense = eigensystem(vs, s);
        const auto roots = secular_roots(vs, s);
        REQUIRE(roots.size() == vs.size());
        for (std::size_t j = 0; j < roots.size(); ++j)
            CHECK(std::abs(roots[j] - dense.eigenvalues[j]) <= 1e-10);
    }
}

TEST_CASE("secular roots interlace the diagonal poles") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 25; ++trial) {
        const auto vs = validate_spectrum(random_spec(gen));
        const double s = std::uniform_real_distribution<double>(0.05, 0.95)(gen);
        const auto roots = secular_roots(vs, s);
        CHECK(roots[0] < s * vs.value(0) + 1e-12);
        for (std::size_t k = 1; k < roots.size(); ++k) {
            CHECK(roots[k] >= s * vs.value(k - 1) - 1e-12);
            CHECK(roots[k] <= s * vs.value(k) + 1e-12);
        }
    }
}

TEST_CASE("secular vectors are eigenvectors with orthogonal ground pair") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 25; ++trial) {
        const auto vs = validate_spectrum(random_spec(gen));
        const double s = std::uniform_real_distribution<double>(0.05, 0.95)(gen);
        const auto h = build_effective(vs, s);
        const auto lo = secular_lowest(vs, s, 2);
        const auto u = secular_vector(vs, s, lo[0]);
        const auto w = secular_vector(vs, s, lo[1]);

        double unorm = 0.0, dot = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j) {
            unorm += u[j] * u[j];
            dot += u[j] * w[j];
        }
        CHECK(unorm == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(std::abs(dot) <= 1e-8);

        const auto hu = apply_h(h, u);
        double resid = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j)
            resid += (hu[j] - lo[0] * u[j]) * (hu[j] - lo[0] * u[j]);
        CHECK(std::sqrt(resid) <= 1e-9);
    }
}

TEST_CASE("coupling strength matches between routes") {
    std::mt19937_64 gen(13);
    for (int trial = 0; trial < 20; ++trial) {
        const auto vs = validate_spectrum(random_spec(gen));
        const double s = std::uniform_real_distribution<double>(0.1, 0.9)(gen);
        const auto dense = eigensystem(vs, s);
        const auto lo = secular_lowest(vs, s, 2);
        const auto u = secular_vector(vs, s, lo[0]);
        const auto w = secular_vector(vs, s, lo[1]);
        CHECK(std::abs(matrix_element(vs, u, w) - dense.v01) <= 1e-8);
    }
}

TEST_CASE("spectral sweep of the ladder pins the known minimum") {
    const auto vs = validate_spectrum(rem_spectrum(16));
    const auto mg = min_gap_numeric(vs);
    CHECK(mg.gap == doctest::Approx(3.7510698900919251e-2).epsilon(1e-9));
    CHECK(mg.s_star == doctest::Approx(0.68343192551169563).epsilon(1e-7));

    const auto closed = rem_min_gap(16);
    CHECK(closed.gap == doctest::Approx((32.0 / 3.0) / 256.0).epsilon(1e-12));
    CHECK(closed.s_star == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    const double rel = std::abs(mg.gap - closed.gap) / closed.gap;
    CHECK(rel == doctest::Approx(0.0997).epsilon(2e-2));
}

TEST_CASE("piecewise large-n gap surrogate has the right shape") {
    CHECK(rem_gap_asymptotic(16, 0.0) == doctest::Approx(16.0));
    CHECK(rem_gap_asymptotic(16, 1.0) == doctest::Approx(1.0));
    // the descending and ascending branches meet at s = 2n/(3n-1) ~ 2/3
    const double s_knee = 2.0 * 16.0 / (3.0 * 16.0 - 1.0);
    CHECK(rem_gap_asymptotic(16, s_knee) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rem_gap_asymptotic(16, s_knee - 1e-3) > 0.0);
    CHECK(rem_gap_asymptotic(16, s_knee + 1e-3) > 0.0);
}

TEST_CASE("marked-class gap bottoms out at the half-way point") {
    const auto vs = validate_spectrum(grover_spectrum(8, 1));
    const auto mg = min_gap_numeric(vs, 0.1, 0.9);
    CHECK(mg.gap == doctest::Approx(0.0625).epsilon(1e-9));
    CHECK(mg.s_star == doctest::Approx(0.5).epsilon(1e-6));

    const auto mid = spectral_at(vs, 0.5);
    CHECK(mid.gap == doctest::Approx(0.0625).epsilon(1e-9));
}

TEST_CASE("diagonal shift never touches the effective spectrum") {
    auto spec = rem_spectrum(12);
    const auto base = spectral_at(validate_spectrum(spec), 0.4);
    spec.offset = -3.7;
    const auto shifted = spectral_at(validate_spectrum(spec), 0.4);
    CHECK(base.gap == shifted.gap);
    CHECK(base.eigenvalues[0] == shifted.eigenvalues[0]);
    CHECK(base.v01 == shifted.v01);
}

TEST_CASE("gap stays positive across the sweep for the ladder") {
    const auto vs = validate_spectrum(rem_spectrum(20));
    for (int i = 1; i < 100; ++i) {
        const auto sd = spectral_at(vs, i / 100.0);
        CHECK(sd.gap > 0.0);
        CHECK_FALSE(sd.degenerate_ground);
        CHECK(std::is_sorted(sd.eigenvalues.begin(), sd.eigenvalues.end()));
    }
}
