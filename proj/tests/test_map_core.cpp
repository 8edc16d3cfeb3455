#include <cmath>
#include <random>

#include "doctest.h"
#include "mapricer/errors.hpp"
#include "mapricer/map_core.hpp"
#include "test_models.hpp"

using namespace mapricer;
using testmodels::brownian_one_state;
using testmodels::example31_map;
using testmodels::three_state;

namespace {

// Dense eigen-decomposition oracle for 2x2 matrices, straight from the
// characteristic polynomial of the assembled matrix entries.
std::pair<Complex, Complex> eigs_2x2(const ComplexMatrix& f) {
    const Complex tr = f(0, 0) + f(1, 1);
    const Complex det = f(0, 0) * f(1, 1) - f(0, 1) * f(1, 0);
    Complex disc = std::sqrt(tr * tr - 4.0 * det);
    if (disc.real() < 0.0) disc = -disc;
    return {0.5 * (tr + disc), 0.5 * (tr - disc)};
}

// Real roots of x^3 + a2 x^2 + a1 x + a0 by Cardano; oracle for the 3-state
// principal eigenvalue.
double max_real_root_cubic(double a2, double a1, double a0) {
    const double p = a1 - a2 * a2 / 3.0;
    const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
    const double disc = q * q / 4.0 + p * p * p / 27.0;
    double best;
    if (disc > 0.0) {
        const double s = std::sqrt(disc);
        best = std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s);
    } else {
        const double r = std::sqrt(-p * p * p / 27.0);
        const double phi = std::acos(std::min(1.0, std::max(-1.0, -q / (2.0 * r))));
        best = -1e300;
        for (int k = 0; k < 3; ++k) {
            const double root =
                2.0 * std::cbrt(r) * std::cos((phi + 2.0 * 3.14159265358979323846 * k) / 3.0);
            best = std::max(best, root);
        }
    }
    return best - a2 / 3.0;
}

}  // namespace

TEST_CASE("laplace exponent") {
    const MapModel m = example31_map();
    CHECK(laplace_exponent(m, 0, Complex{0.0}) == Complex{0.0});
    CHECK(laplace_exponent(m, 1, Complex{0.0}) == Complex{0.0});
    // psi_+(1) = q (lambda/(lambda-1) - 1) with q=1, lambda=2.
    CHECK(laplace_exponent(m, 0, Complex{1.0}).real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(laplace_exponent(m, 0, Complex{2.0}), StripViolation);

    const MapModel b = brownian_one_state(0.3, 0.5);
    CHECK(laplace_exponent(b, 0, Complex{2.0}).real() ==
          doctest::Approx(0.3 * 2.0 + 0.25 * 4.0 / 2.0).epsilon(1e-14));
}

TEST_CASE("transition mgf") {
    const MapModel m = example31_map();
    CHECK(transition_mgf(m, 0, 1, Complex{0.0}) == Complex{1.0});
    CHECK(transition_mgf(m, 0, 1, Complex{1.0}).real() == doctest::Approx(2.0));
    CHECK(transition_mgf(m, 1, 0, Complex{1.0}).real() == doctest::Approx(1.5));
    CHECK_THROWS_AS(transition_mgf(m, 0, 1, Complex{1.9999999999}), StripViolation);
    CHECK_THROWS_AS(transition_mgf(m, 0, 0, Complex{0.5}), Error);

    const MapModel t = three_state();
    // Degenerate(0) pairs give identically one.
    CHECK(transition_mgf(t, 0, 2, Complex{0.7}) == Complex{1.0});
}

TEST_CASE("matrix exponent F") {
    const MapModel m = example31_map();
    // F(0) is exactly the generator.
    const ComplexMatrix f0 = matrix_exponent(m, Complex{0.0});
    CHECK(f0(0, 0) == Complex{-1.0});
    CHECK(f0(0, 1) == Complex{1.0});
    CHECK(f0.row_sum(0) == Complex{0.0});
    CHECK(f0.row_sum(1) == Complex{0.0});

    // Entrywise at z = 1 per the explicit formulas.
    const ComplexMatrix f1 = matrix_exponent(m, Complex{1.0});
    CHECK(f1(0, 0).real() == doctest::Approx(0.0));          // psi_+(1) - q = 1 - 1
    CHECK(f1(0, 1).real() == doctest::Approx(2.0));          // q G_+(1)
    CHECK(f1(1, 0).real() == doctest::Approx(1.5));          // q G_-(1)
    CHECK(f1(1, 1).real() == doctest::Approx(0.5 - 1.0));    // psi_-(1) - q

    // One state: 1x1 matrix [psi(z)].
    const MapModel b = brownian_one_state(0.1, 0.4);
    const ComplexMatrix fb = matrix_exponent(b, Complex{1.5});
    CHECK(fb.dim() == 1);
    CHECK(fb(0, 0) == laplace_exponent(b, 0, Complex{1.5}));

    CHECK_THROWS_AS(matrix_exponent(m, Complex{2.2}), StripViolation);
}

TEST_CASE("transform matrix basics") {
    const MapModel m = example31_map();
    const ComplexMatrix id = transform_matrix(m, 0.0, Complex{0.7});
    CHECK(id(0, 0) == Complex{1.0});
    CHECK(id(0, 1) == Complex{0.0});

    // z = 0: the transition matrix of J, rows summing to one.
    const ComplexMatrix p = transform_matrix(m, 1.0, Complex{0.0});
    CHECK(p.row_sum(0).real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.row_sum(1).real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p(0, 1).real() > 0.0);
    CHECK(std::abs(p(0, 1).imag()) < 1e-14);

    const MapModel t = three_state();
    const ComplexMatrix pt = transform_matrix(t, 0.5, Complex{0.0});
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(pt.row_sum(i).real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("2-state closed form vs general scaling-and-squaring") {
    const MapModel m = example31_map();
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> tu(0.05, 3.0), zu(-3.0, 1.8), vu(-4.0, 4.0);
    for (int i = 0; i < 50; ++i) {
        const double t = tu(gen);
        const Complex z{zu(gen), vu(gen)};
        const ComplexMatrix closed = transform_matrix(m, t, z);
        const ComplexMatrix pade = transform_matrix_pade(m, t, z);
        const double scale = std::max(closed.max_abs(), 1e-30);
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t c = 0; c < 2; ++c)
                CHECK(std::abs(closed(r, c) - pade(r, c)) / scale < 1e-10);
    }
}

TEST_CASE("semigroup property") {
    for (const MapModel& m : {example31_map(), three_state()}) {
        for (double z : {0.0, 0.5, 1.0}) {
            if (!m.strip().contains(z)) continue;
            const ComplexMatrix lhs = transform_matrix(m, 1.5, Complex{z});
            const ComplexMatrix rhs =
                transform_matrix(m, 0.6, Complex{z}) * transform_matrix(m, 0.9, Complex{z});
            const double scale = std::max(lhs.max_abs(), 1e-30);
            for (std::size_t r = 0; r < m.n_states(); ++r)
                for (std::size_t c = 0; c < m.n_states(); ++c)
                    CHECK(std::abs(lhs(r, c) - rhs(r, c)) / scale < 1e-9);
        }
    }
}

TEST_CASE("eigen2 against the dense 2x2 oracle") {
    const MapModel m = example31_map();
    for (double z : {0.0, 0.5, 1.0, -1.0}) {
        const Eigen2 ev = eigen2(m, Complex{z});
        const ComplexMatrix f = matrix_exponent(m, Complex{z});
        const auto [big, small] = eigs_2x2(f);
        CHECK(std::abs(ev.alpha - big) < 1e-10);
        CHECK(std::abs(ev.beta - small) < 1e-10);
        // alpha + beta = trace = psi^q_+ + psi^q_-.
        CHECK(std::abs(ev.alpha + ev.beta - (f(0, 0) + f(1, 1))) < 1e-10);
    }
    // z = 0: eigenvalues of q; one vanishes.
    const Eigen2 at0 = eigen2(m, Complex{0.0});
    CHECK(std::abs(at0.alpha) < 1e-14);
    CHECK(at0.beta.real() == doctest::Approx(-2.0));

    CHECK_THROWS_AS(eigen2(three_state(), Complex{0.5}), WrongStateCount);
}

TEST_CASE("eigen2 near-repeated root: vanishing coupling, symmetric exponents") {
    // Symmetric components force psi^q_+ == psi^q_-; a vanishing coupling
    // q_+ q_- G_+ G_- then sends Delta to 0 and the eigenvalues merge.  MGFs
    // are strictly positive on real strips, so the limit is approached by
    // shrinking the switch rates; this also exercises the sinh(x)/x series
    // branch of the closed-form transform matrix.
    LevyComponent lc{0.1, 0.3, {}};
    const double q = 1e-8;
    MapModel m({"+", "-"}, {{-q, q}, {q, -q}}, {lc, lc}, {}, 0.0);
    const Eigen2 ev = eigen2(m, Complex{0.4});
    CHECK(std::abs(ev.delta) == doctest::Approx(2.0 * q).epsilon(1e-12));
    CHECK(std::abs(ev.alpha - ev.beta - ev.delta) < 1e-15);
    const ComplexMatrix closed = transform_matrix(m, 1.0, Complex{0.4});
    const ComplexMatrix pade = transform_matrix_pade(m, 1.0, Complex{0.4});
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c)
            CHECK(std::abs(closed(r, c) - pade(r, c)) < 1e-12 * closed.max_abs());
}

TEST_CASE("principal eigenvalue") {
    for (const MapModel& m :
         {example31_map(), three_state(), brownian_one_state(0.2, 0.7), testmodels::example31_neg_drift()}) {
        CHECK(std::abs(principal_eigenvalue(m, 0.0)) < 1e-12);
    }
    // One state: plain psi.
    const MapModel b = brownian_one_state(-0.3, 0.6);
    CHECK(principal_eigenvalue(b, 1.2) ==
          doctest::Approx(laplace_exponent(b, 0, Complex{1.2}).real()).epsilon(1e-13));

    // Two states: max of the eigen2 outputs.
    const MapModel m = example31_map();
    const Eigen2 ev = eigen2(m, Complex{1.0});
    CHECK(principal_eigenvalue(m, 1.0) ==
          doctest::Approx(std::max(ev.alpha.real(), ev.beta.real())).epsilon(1e-12));

    // Three states: Cardano oracle on the characteristic polynomial.
    const MapModel t = three_state();
    for (double z : {0.3, 0.8, -0.5}) {
        const ComplexMatrix f = matrix_exponent(t, Complex{z});
        const double tr = (f(0, 0) + f(1, 1) + f(2, 2)).real();
        double m2 = 0.0;  // sum of principal 2x2 minors
        m2 += (f(0, 0) * f(1, 1) - f(0, 1) * f(1, 0)).real();
        m2 += (f(0, 0) * f(2, 2) - f(0, 2) * f(2, 0)).real();
        m2 += (f(1, 1) * f(2, 2) - f(1, 2) * f(2, 1)).real();
        const double det =
            (f(0, 0) * (f(1, 1) * f(2, 2) - f(1, 2) * f(2, 1)) -
             f(0, 1) * (f(1, 0) * f(2, 2) - f(1, 2) * f(2, 0)) +
             f(0, 2) * (f(1, 0) * f(2, 1) - f(1, 1) * f(2, 0)))
                .real();
        const double oracle = max_real_root_cubic(-tr, m2, -det);
        CHECK(principal_eigenvalue(t, z) == doctest::Approx(oracle).epsilon(1e-9));
    }
}

TEST_CASE("kappa is convex on sampled grids") {
    for (const MapModel& m : {example31_map(), three_state(), testmodels::example31_neg_drift()}) {
        const Strip s = m.strip();
        const double lo = std::isfinite(s.lo) ? s.lo + 0.05 : -3.0;
        const double hi = (std::isfinite(s.hi) ? s.hi : 3.0) - 0.05;
        const double h = (hi - lo) / 24.0;
        for (int i = 1; i < 24; ++i) {
            const double z = lo + i * h;
            const double mid = principal_eigenvalue(m, z);
            const double left = principal_eigenvalue(m, z - h);
            const double right = principal_eigenvalue(m, z + h);
            CHECK(mid <= 0.5 * (left + right) + 1e-10);
        }
    }
}

TEST_CASE("cramer number") {
    // psi(z) = -2z + z^2: root at 2.
    const MapModel root2 = brownian_one_state(-2.0, std::sqrt(2.0));
    const CramerNumber c1 = cramer_number(root2);
    REQUIRE(c1.kind == CramerNumber::Kind::Root);
    CHECK(c1.theta == doctest::Approx(2.0).epsilon(1e-9));

    // psi(z) = z^2 > 0 for z > 0: theta = 0 by convention.
    const CramerNumber c2 = cramer_number(brownian_one_state(0.0, std::sqrt(2.0)));
    CHECK(c2.kind == CramerNumber::Kind::Zero);

    // Negative drift, no upward motion: kappa < 0 on all z > 0.
    const CramerNumber c3 = cramer_number(brownian_one_state(-1.0, 0.0));
    CHECK(c3.kind == CramerNumber::Kind::Infinite);
    CHECK(c3.greater_than(5.0));

    // Two-state variant with negative drifts: root against a dense grid scan.
    const MapModel neg = testmodels::example31_neg_drift();
    const CramerNumber c4 = cramer_number(neg);
    REQUIRE(c4.kind == CramerNumber::Kind::Root);
    double scan_root = -1.0;
    double prev = 0.0;
    const int n = 10000;
    for (int i = 1; i <= n; ++i) {
        const double z = 2.0 * i / (n + 1);
        if (!neg.strip().contains(z)) break;
        const double k = principal_eigenvalue(neg, z);
        if (prev < 0.0 && k >= 0.0) {
            scan_root = z;
            break;
        }
        prev = k;
    }
    REQUIRE(scan_root > 0.0);
    CHECK(c4.theta == doctest::Approx(scan_root).epsilon(1e-3));
    CHECK(std::abs(principal_eigenvalue(neg, c4.theta)) < 1e-8);
}
