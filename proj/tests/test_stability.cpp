#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "optoamp/errors.hpp"
#include "optoamp/stability.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace optoamp;

namespace {

SystemParams fig4_params() {
    SystemParams p;
    p.delta1     = 1.0;
    p.delta2     = -1.0;
    p.coupling_j = 1.0;
    p.coupling_g = 0.2561;
    p.kappa1     = 0.1;
    p.kappa2     = 0.0;
    p.gamma      = 0.1;
    return p;
}

SystemParams random_params(std::mt19937& rng) {
    std::uniform_real_distribution<double> pos(0.02, 3.0);
    std::uniform_real_distribution<double> sym(-2.0, 2.0);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    SystemParams p;
    p.delta1     = sym(rng);
    p.delta2     = sym(rng);
    p.coupling_j = 3.0 * frac(rng);
    p.coupling_g = 1.5 * frac(rng);
    p.kappa1     = pos(rng);
    p.kappa2     = frac(rng) < 0.5 ? frac(rng) : 0.0;
    p.gamma      = 0.02 + frac(rng);
    return p;
}

// Convolution-based polynomial product, used to build reference polynomials.
std::array<double, 7> poly_product(const std::array<double, 3>& a,
                                   const std::array<double, 3>& b,
                                   const std::array<double, 3>& c) {
    std::array<double, 5> ab{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) ab[i + j] += a[i] * b[j];
    std::array<double, 7> abc{};
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 3; ++j) abc[i + j] += ab[i] * c[j];
    return abc;
}

} // namespace

TEST_CASE("eigen spectrum verdicts at the resolved-sideband point") {
    SystemParams p = fig4_params();
    CHECK(eigen_spectrum(p).verdict == Verdict::Stable);
    CHECK(eigen_spectrum(p).hurwitz_consistent);

    p.coupling_g = 0.2662; // just above the boundary
    CHECK(eigen_spectrum(p).verdict == Verdict::Unstable);

    p.coupling_g = 0.0;
    CHECK(eigen_spectrum(p).verdict == Verdict::Stable);
}

TEST_CASE("passive system is stable for any rates") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> pos(0.02, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        SystemParams p = fig4_params();
        p.coupling_g   = 0.0;
        p.kappa1       = pos(rng);
        p.kappa2       = pos(rng);
        p.gamma        = pos(rng);
        p.coupling_j   = pos(rng);
        CHECK(eigen_spectrum(p).verdict == Verdict::Stable);
    }
}

TEST_CASE("spectrum is closed under complex conjugation") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const auto report = eigen_spectrum(random_params(rng));
        for (const Complex lam : report.eigenvalues) {
            double best = 1e30;
            for (const Complex mu : report.eigenvalues) {
                best = std::min(best, std::abs(mu - std::conj(lam)));
            }
            CHECK(best < 1e-10);
        }
    }
}

TEST_CASE("characteristic polynomial of decoupled modes factors into quadratics") {
    SystemParams p;
    p.delta1     = 0.7;
    p.delta2     = -1.3;
    p.coupling_j = 0.0;
    p.coupling_g = 0.0;
    p.kappa1     = 0.4;
    p.kappa2     = 0.25;
    p.gamma      = 0.15;
    // Each mode pair contributes lambda^2 + r lambda + (r^2/4 + Delta^2),
    // ascending coefficients {const, linear, quadratic}.
    const std::array<double, 3> q1{p.kappa1 * p.kappa1 / 4 + p.delta1 * p.delta1, p.kappa1, 1.0};
    const std::array<double, 3> q2{p.kappa2 * p.kappa2 / 4 + p.delta2 * p.delta2, p.kappa2, 1.0};
    const std::array<double, 3> qm{p.gamma * p.gamma / 4 + 1.0, p.gamma, 1.0};
    const auto expected = poly_product(q1, q2, qm);

    const auto poly = characteristic_polynomial(p);
    for (int k = 0; k < 7; ++k) {
        CHECK(poly.coeffs[k] == doctest::Approx(expected[k]).epsilon(1e-12));
    }
}

TEST_CASE("characteristic polynomial cross-checked by determinant and trace") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        const SystemParams p = trial == 0 ? fig4_params() : random_params(rng);
        const auto poly      = characteristic_polynomial(p);
        CHECK(poly.coeffs[6] == 1.0);

        const Matrix6c m  = build_drift_matrix(p).entries;
        const Complex det = (-m).determinant();
        CHECK(std::abs(det.imag()) < 1e-9 * std::max(1.0, std::abs(det)));
        CHECK(poly.coeffs[0] ==
              doctest::Approx(det.real()).epsilon(1e-9));

        const double trace = -(p.kappa1 + p.kappa2 + p.gamma);
        CHECK(-poly.coeffs[5] == doctest::Approx(trace).epsilon(1e-12));
    }
}

TEST_CASE("Routh-Hurwitz on reference polynomials") {
    // (lambda + 1)^6
    RealPolynomial all_left{{1, 6, 15, 20, 15, 6, 1}};
    CHECK(routh_hurwitz(all_left) == RouthVerdict::Stable);

    // (lambda - 1)(lambda + 2)^5 has one right-half-plane root:
    // expands to lambda^6 + 9 lambda^5 + 30 lambda^4 + 40 lambda^3 - 80 lambda - 32.
    RealPolynomial one_right{{-32, -80, 0, 40, 30, 9, 1}};
    CHECK(routh_hurwitz(one_right) == RouthVerdict::Unstable);

    // (lambda^2 + 4)(lambda + 1)^4 has a purely imaginary pair:
    // lambda^6 + 4 lambda^5 + 10 lambda^4 + 20 lambda^3 + 25 lambda^2 + 16 lambda + 4.
    RealPolynomial marginal{{4, 16, 25, 20, 10, 4, 1}};
    CHECK(routh_hurwitz(marginal) == RouthVerdict::Degenerate);

    RealPolynomial zero_leading{{1, 1, 1, 1, 1, 1, 0}};
    CHECK_THROWS_AS(routh_hurwitz(zero_leading), std::invalid_argument);
}

TEST_CASE("Routh-Hurwitz verdicts on the operating point") {
    SystemParams p = fig4_params();
    CHECK(routh_hurwitz(characteristic_polynomial(p)) == RouthVerdict::Stable);

    p.coupling_g = boundary_g1(1.0, 0.1, 0.1).g_crit; // marginal point
    CHECK(routh_hurwitz(characteristic_polynomial(p)) == RouthVerdict::Degenerate);

    p.coupling_g = 0.2662;
    CHECK(routh_hurwitz(characteristic_polynomial(p)) == RouthVerdict::Unstable);
}

TEST_CASE("Routh-Hurwitz agrees with eigenvalues on random draws") {
    std::mt19937 rng(11);
    int counted = 0;
    while (counted < 300) {
        const SystemParams p = random_params(rng);
        const auto report    = eigen_spectrum(p);
        const auto rh        = routh_hurwitz(characteristic_polynomial(p));
        if (rh == RouthVerdict::Degenerate || std::abs(report.max_real_part) < 1e-6) {
            continue; // boundary band excluded
        }
        if (rh == RouthVerdict::Stable) {
            CHECK(report.verdict == Verdict::Stable);
        } else {
            CHECK(report.verdict == Verdict::Unstable);
        }
        CHECK(report.hurwitz_consistent);
        ++counted;
    }
}

TEST_CASE("first boundary: frozen values of the reference operating points") {
    const auto b1 = boundary_g1(1.0, 0.1, 0.1);
    CHECK(b1.g_crit == doctest::Approx(0.2561768188185652).epsilon(1e-13));
    CHECK(b1.omega_crit == doctest::Approx(1.224744871391589).epsilon(1e-13));
    CHECK(b1.branch == Branch::G1);

    const auto b2 = boundary_g1(2.0, 2.0, 0.6);
    CHECK(b2.g_crit == doctest::Approx(1.074835201349105).epsilon(1e-13));
    CHECK(b2.omega_crit == doctest::Approx(1.3867504905630728).epsilon(1e-13));

    const auto b3 = boundary_g1(0.0, 0.1, 0.1);
    CHECK(b3.omega_crit == 1.0);
    CHECK(b3.g_crit == doctest::Approx(0.0500156225593564).epsilon(1e-12));

    CHECK_THROWS_AS(boundary_g1(1.0, 0.0, 0.1), NonPositiveRate);
    CHECK_THROWS_AS(boundary_g1(-1.0, 0.1, 0.1), NegativeValue);
}

TEST_CASE("second boundary: direct evaluations") {
    const auto b1 = boundary_g2(1.0, 0.1, 0.1);
    CHECK(b1.g_crit == doctest::Approx(0.5049814353023286).epsilon(1e-12));
    CHECK(b1.omega_crit == doctest::Approx(std::sqrt(2.0025)).epsilon(1e-13));
    CHECK(b1.branch == Branch::G2);

    const auto b2 = boundary_g2(0.0, 0.3, 0.3);
    CHECK(b2.omega_crit == doctest::Approx(std::sqrt(1.0 + 0.3 * 0.3 / 4.0)).epsilon(1e-13));

    const auto b3 = boundary_g2(3.0, 0.1, 0.1);
    CHECK(b3.omega_crit == doctest::Approx(std::sqrt(10.0025)).epsilon(1e-13));
}

TEST_CASE("G(2) always lies above G(1)") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> pos(0.02, 3.0);
    std::uniform_real_distribution<double> jdist(0.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double j = jdist(rng), k1 = pos(rng), gm = pos(rng);
        CHECK(boundary_g2(j, k1, gm).g_crit > boundary_g1(j, k1, gm).g_crit);
    }
}

TEST_CASE("at G = G(1) the drift matrix has an eigenvalue pair at +-i w(1)") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> pos(0.05, 3.0);
    std::uniform_real_distribution<double> jdist(0.0, 3.0);
    for (int trial = 0; trial < 25; ++trial) {
        const double j = jdist(rng), k1 = pos(rng), gm = 0.05 + 0.95 * pos(rng) / 3.0;
        const auto b = boundary_g1(j, k1, gm);

        SystemParams p;
        p.delta1     = 1.0;
        p.delta2     = -1.0;
        p.coupling_j = j;
        p.coupling_g = b.g_crit;
        p.kappa1     = k1;
        p.kappa2     = 0.0;
        p.gamma      = gm;
        const auto report = eigen_spectrum(p);

        double dplus = 1e30, dminus = 1e30;
        for (const Complex lam : report.eigenvalues) {
            dplus  = std::min(dplus, std::abs(lam - Complex(0.0, b.omega_crit)));
            dminus = std::min(dminus, std::abs(lam - Complex(0.0, -b.omega_crit)));
        }
        CHECK(dplus < 1e-6);
        CHECK(dminus < 1e-6);
    }
}

TEST_CASE("crossing G(1) flips the sign of the leading eigenvalue") {
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> pos(0.05, 2.0);
    std::uniform_real_distribution<double> jdist(0.1, 3.0);
    for (int trial = 0; trial < 25; ++trial) {
        const double j = jdist(rng), k1 = pos(rng), gm = pos(rng);
        const auto b = boundary_g1(j, k1, gm);
        REQUIRE(boundary_g2(j, k1, gm).g_crit > b.g_crit);

        SystemParams p;
        p.delta1     = 1.0;
        p.delta2     = -1.0;
        p.coupling_j = j;
        p.kappa1     = k1;
        p.kappa2     = 0.0;
        p.gamma      = gm;

        p.coupling_g = 0.999 * b.g_crit;
        CHECK(eigen_spectrum(p).max_real_part < 0.0);
        p.coupling_g = 1.001 * b.g_crit;
        CHECK(eigen_spectrum(p).max_real_part > 0.0);
    }
}

TEST_CASE("stability map flip brackets the analytic boundary (Fig-2 cut)") {
    // boundary_g1(3, 0.1, 0.1) = 2.2518; with a 0.01-step G grid the verdict
    // must flip between 2.25 and 2.26.
    const std::vector<double> gammas{0.1};
    const auto gs  = linspace(2.20, 2.30, 11);
    const auto map = stability_map(3.0, 0.1, gammas, gs);
    REQUIRE(map.x_axis.size() == 1);
    REQUIRE(map.y_axis.size() == 11);

    int flip_row = -1;
    for (std::size_t iy = 0; iy + 1 < gs.size(); ++iy) {
        if (map.at(iy, 0) < 0.25 && map.at(iy + 1, 0) > 0.75) {
            flip_row = static_cast<int>(iy);
        }
    }
    REQUIRE(flip_row >= 0);
    const double g_before = gs[flip_row];
    const double g_after  = gs[flip_row + 1];
    const double g_crit   = boundary_g1(3.0, 0.1, 0.1).g_crit;
    CHECK(g_before < g_crit);
    CHECK(g_after > g_crit);
    CHECK(g_after - g_before == doctest::Approx(0.01).epsilon(1e-9));
}

TEST_CASE("stability map: J = 1 flip brackets 0.2562") {
    const std::vector<double> gammas{0.1};
    const auto gs  = linspace(0.20, 0.30, 11);
    const auto map = stability_map(1.0, 0.1, gammas, gs);
    const double g_crit = boundary_g1(1.0, 0.1, 0.1).g_crit;
    for (std::size_t iy = 0; iy + 1 < gs.size(); ++iy) {
        if (gs[iy + 1] < g_crit) CHECK(map.at(iy + 1, 0) == 0.0);
        if (gs[iy] > g_crit) CHECK(map.at(iy, 0) == 1.0);
    }
}

TEST_CASE("stability map: the G = 0 row is stable everywhere") {
    const auto gammas = linspace(0.05, 1.0, 12);
    const std::vector<double> gs{0.0};
    const auto map = stability_map(3.0, 0.1, gammas, gs);
    for (std::size_t ix = 0; ix < gammas.size(); ++ix) {
        CHECK(map.at(0, ix) == 0.0);
    }
}

TEST_CASE("stability map parallel/serial equality and empty-grid error") {
    const auto gammas = linspace(0.05, 0.8, 7);
    const auto gs     = linspace(0.0, 2.5, 9);
    const auto serial   = stability_map_serial(3.0, 0.1, gammas, gs);
    const auto parallel = stability_map(3.0, 0.1, gammas, gs, 2);
    CHECK(serial.cells == parallel.cells);

    CHECK_THROWS_AS(stability_map(3.0, 0.1, {}, gs), EmptyGrid);
    CHECK_THROWS_AS(stability_map_serial(3.0, 0.1, gammas, {}), EmptyGrid);
}
