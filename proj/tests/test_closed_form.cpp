#include <cmath>

#include "doctest.h"
#include "mapricer/closed_form.hpp"
#include "mapricer/errors.hpp"
#include "mapricer/map_core.hpp"
#include "mapricer/quadrature.hpp"
#include "mapricer/simulator.hpp"
#include "mapricer/special_functions.hpp"
#include "test_models.hpp"

using namespace mapricer;
using testmodels::example31;

TEST_CASE("residue coefficients") {
    const CpExpModel m = example31();
    const DCoefficients dp = d_coefficients(m, 0);
    const double damp = std::exp(-2.0);
    CHECK(dp.d1 == doctest::Approx(-0.5 * damp).epsilon(1e-14));
    CHECK(dp.d2 == doctest::Approx(damp * 2.0 * (3.0 - 1.0) / 7.0).epsilon(1e-14));
    CHECK(dp.s_star == doctest::Approx(12.0 / 5.0).epsilon(1e-14));
    CHECK(dp.c == doctest::Approx(1.0 - 12.0 / 5.0).epsilon(1e-14));

    // lambda_+ == lambda_-: the skew coefficient vanishes.
    const CpExpModel sym{1.0, 2.5, 2.5, 1.0, 0.0};
    CHECK(d_coefficients(sym, 0).d3 == 0.0);
    CHECK(d_coefficients(sym, 1).d3 == 0.0);

    CHECK_THROWS_AS(d_coefficients(CpExpModel{1.0, 0.9, 3.0, 1.0, 0.0}, 0), Error);
}

TEST_CASE("D function: continuity at 1 and antisymmetry of the difference") {
    const CpExpModel m = example31();
    for (int alpha : {0, 1}) {
        CHECK(d_function(m, alpha, 1.0 - 1e-12) ==
              doctest::Approx(d_function(m, alpha, 1.0)).epsilon(1e-9));
    }
    // D_{-a} - D_a is antisymmetric under swapping alpha together with the
    // rates: the swap relabels the same model with the roles reversed.
    const CpExpModel swapped{m.q, m.lambda_minus, m.lambda_plus, m.maturity, m.rate};
    for (double k : {0.3, 0.9, 1.0, 1.7, 4.0}) {
        const double diff = d_function(m, 1, k) - d_function(m, 0, k);
        const double diff_swapped = d_function(swapped, 1, k) - d_function(swapped, 0, k);
        CHECK(diff == doctest::Approx(-diff_swapped).epsilon(1e-12));
    }
}

TEST_CASE("kernel R smooth part") {
    const CpExpModel m = example31();
    CHECK(kernel_r_smooth(m, 0, 0.5) == 0.0);
    // k = e: sqrt(qt la) e^{-la} I_1(2 sqrt(qt la)) / 1 for la = 2 (log k = 1).
    const double expect = std::sqrt(2.0) * std::exp(-2.0) * bessel_i1(2.0 * std::sqrt(2.0));
    CHECK(kernel_r_smooth(m, 0, std::exp(1.0)) == doctest::Approx(expect).epsilon(1e-12));
    // k -> 1+ limit equals qt lambda_a.
    CHECK(kernel_r_smooth(m, 0, 1.0 + 1e-13) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(kernel_r_smooth(m, 1, 1.0 + 1e-13) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("kernel R mass and Mellin transform by quadrature") {
    const CpExpModel m = example31();
    // Total smooth mass: int_1^inf J(k)/k dk = e^{qt} - 1 (substituting x = log k).
    for (int alpha : {0, 1}) {
        double mass = 0.0;
        for (int p = 0; p < 60; ++p)
            mass += gauss_legendre_64(
                [&](double x) { return kernel_r_smooth(m, alpha, std::exp(x)); }, p * 0.5,
                (p + 1) * 0.5);
        CHECK(mass == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-8));
    }
    // Mellin transform at x = 0.5 approaches exp(qt la/(la - x)) as the cutoff
    // grows; the unit atom carried symbolically contributes the +1.
    const double x = 0.5;
    double prev = 0.0;
    for (double cutoff : {8.0, 16.0, 32.0}) {
        double val = 0.0;
        const int panels = static_cast<int>(cutoff * 4);
        for (int p = 0; p < panels; ++p) {
            const double lo = p * cutoff / panels, hi = (p + 1) * cutoff / panels;
            val += gauss_legendre_64(
                [&](double lx) {
                    return std::exp(x * lx) * kernel_r_smooth(m, 0, std::exp(lx));
                },
                lo, hi);
        }
        const double target = std::exp(2.0 / (2.0 - x));
        CHECK(std::abs(1.0 + val - target) <= std::abs(1.0 + prev - target) + 1e-12);
        prev = val;
        if (cutoff == 32.0) CHECK(1.0 + val == doctest::Approx(target).epsilon(1e-6));
    }
}

TEST_CASE("series price against the transform identities") {
    const CpExpModel m = example31();
    const SeriesTruncation tight{1e-12, 500};
    // At the money, jumps are non-negative so Y >= 1 a.s. and the call price
    // equals E[Y_T] - 1 exactly.
    const double ey = cp_exp_row_transform(m, 0, Complex{1.0}).real();
    CHECK(call_price_series(m, 0, 1.0, tight).value == doctest::Approx(ey - 1.0).epsilon(1e-10));
    CHECK(atm_price(m, 0, tight).value == doctest::Approx(ey - 1.0).epsilon(1e-10));
    // Same for k < 1: the payoff is linear there.
    for (double k : {0.2, 0.7}) {
        CHECK(call_price_series(m, 0, k, tight).value == doctest::Approx(ey - k).epsilon(1e-10));
    }
    // ATM via the hypergeometric route agrees with the raw series.
    CHECK(atm_price(m, 1, tight).value ==
          doctest::Approx(call_price_series(m, 1, 1.0, tight).value).epsilon(1e-9));
}

TEST_CASE("series orientation symmetry") {
    // Swapping the states and the rates relabels the same model.
    const CpExpModel a{1.0, 2.0, 3.0, 1.0, 0.05};
    const CpExpModel b{1.0, 3.0, 2.0, 1.0, 0.05};
    for (double k : {0.4, 1.0, 1.3, 2.2}) {
        CHECK(call_price_series(a, 0, k).value ==
              doctest::Approx(call_price_series(b, 1, k).value).epsilon(1e-10));
        CHECK(call_price_series(a, 1, k).value ==
              doctest::Approx(call_price_series(b, 0, k).value).epsilon(1e-10));
    }
}

TEST_CASE("series price against Monte Carlo") {
    const CpExpModel m = example31(1.0, 0.1);
    const MapModel map = to_map_model(m);
    McConfig cfg;
    cfg.n_paths = 150000;
    cfg.seed = 321;
    for (double k : {0.5, 1.0, 1.8}) {
        const double series = call_price_series(m, 0, k).value;
        const PriceEstimate mc = mc_european(
            map, 0, 1.0, [k](double x) { return std::max(x - k, 0.0); }, 1.0, cfg);
        CHECK(std::abs(series - mc.value) <= 3.0 * mc.error);
    }
    // Far out of the money the price decays monotonically toward zero (the
    // exponential-jump tail is heavy, so the decay is slow: no small cap at
    // k = 50) and stays below the Monte Carlo band.
    const double far = call_price_series(m, 0, 50.0).value;
    CHECK(far >= 0.0);
    CHECK(far < call_price_series(m, 0, 10.0).value);
    CHECK(call_price_series(m, 0, 500.0).value < far);
    CHECK(std::abs(far - cp_exp_call_mellin(example31(), 0, 50.0) * std::exp(-0.1)) < 1e-8);
}

TEST_CASE("series decreasing and convex in strike") {
    const CpExpModel m = example31();
    const double h = 0.05;
    double prev = call_price_series(m, 0, 0.2).value;
    for (double k = 0.2 + h; k <= 3.0; k += h) {
        const double cur = call_price_series(m, 0, k).value;
        CHECK(cur <= prev + 1e-10);
        if (k + h <= 3.0) {
            const double next = call_price_series(m, 0, k + h).value;
            CHECK(next - 2.0 * cur + prev >= -1e-8);
        }
        prev = cur;
    }
}

TEST_CASE("truncation cap reports Truncated") {
    const CpExpModel m = example31();
    CHECK_THROWS_AS(call_price_series(m, 0, 1.5, SeriesTruncation{1e-12, 3}), Truncated);
    CHECK_THROWS_AS(atm_price(m, 0, SeriesTruncation{1e-14, 2}), Truncated);
}

TEST_CASE("atm vanishes as the activity dies") {
    const CpExpModel quiet{1e-8, 2.0, 3.0, 1.0, 0.0};
    CHECK(atm_price(quiet, 0).value == doctest::Approx(0.0).epsilon(1e-7));
}

TEST_CASE("skew closed form") {
    const SkewModel m = testmodels::skew_example(0.5, 1.0, 0.0);
    // Zero at and beyond the money: the log-price never increases.
    CHECK(skew_call_price(m, 1.0) == 0.0);
    CHECK(skew_call_price(m, 1.5) == 0.0);
    CHECK(skew_call_price(m, 2.0) == 0.0);
    // Continuous at 1 and non-increasing.
    CHECK(skew_call_price(m, 1.0 - 1e-9) == doctest::Approx(0.0).epsilon(1e-7));
    double prev = skew_call_price(m, 0.01);
    for (double k = 0.05; k < 1.0; k += 0.05) {
        const double cur = skew_call_price(m, k);
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
    // k -> 0 limit matches the discounted mean e^{-(r+q)T} and the explicit
    // explicit value at the point 2qT = 1, r = 0 where it collapses to e^{-1/2}.
    CHECK(skew_call_price(m, 1e-10) == doctest::Approx(skew_price_at_zero(m)).epsilon(1e-8));
    CHECK(skew_price_at_zero(m) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    const SkewModel fast{40.0, 1.0, 0.0};
    CHECK(skew_price_at_zero(fast) < 1e-17);
}

TEST_CASE("skew closed form against Monte Carlo") {
    const SkewModel m = testmodels::skew_example(0.5, 1.0, 0.0);
    const MapModel map = to_map_model(m);
    McConfig cfg;
    cfg.n_paths = 150000;
    cfg.seed = 654;
    for (double k : {0.1, 0.5, 0.9}) {
        const PriceEstimate mc = mc_european(
            map, 0, 1.0, [k](double x) { return std::max(x - k, 0.0); }, 1.0, cfg);
        CHECK(std::abs(skew_call_price(m, k) - mc.value) <= 3.0 * mc.error);
    }
    // Discounted MC mean vs the k = 0 price.
    const PriceEstimate mean = mc_european(map, 0, 1.0, [](double x) { return x; }, 1.0, cfg);
    CHECK(std::abs(skew_price_at_zero(m) - mean.value) <= 3.0 * mean.error);
}

TEST_CASE("model detection") {
    CHECK(detect_cp_exp(testmodels::example31_map(), 1.0).has_value());
    CHECK_FALSE(detect_cp_exp(to_map_model(testmodels::skew_example()), 1.0).has_value());
    CHECK(detect_skew(to_map_model(testmodels::skew_example()), 1.0).has_value());
    CHECK_FALSE(detect_skew(testmodels::example31_map(), 1.0).has_value());
    CHECK_FALSE(detect_cp_exp(testmodels::three_state(), 1.0).has_value());
    // Drift breaks the shape.
    CHECK_FALSE(detect_cp_exp(testmodels::example31_neg_drift(), 1.0).has_value());
}
