#include <cmath>
#include <map>

#include "doctest.h"
#include "mapricer/analysis.hpp"
#include "mapricer/map_core.hpp"
#include "mapricer/simulator.hpp"
#include "test_models.hpp"

using namespace mapricer;
using testmodels::brownian_one_state;
using testmodels::example31_map;
using testmodels::trivial_model;

TEST_CASE("deterministic single paths") {
    // q == 0: single regime, no switches.
    const MapModel b = brownian_one_state(1.0, 0.0);
    PhiloxStream rng(1, 0);
    const PathSample p = sample_path(b, 0, 1.0, rng);
    CHECK(p.switch_times.empty());
    CHECK(p.j_terminal == 0);
    // Pure drift a=1: xi_T = 1, integral = e - 1 exactly.
    CHECK(p.xi_terminal == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.integral_expxi == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
    CHECK(p.xi_sup == doctest::Approx(1.0));
    CHECK(p.xi_inf == 0.0);

    PhiloxStream rng2(1, 0);
    const PathSample t = sample_path(trivial_model(), 0, 2.0, rng2);
    CHECK(t.xi_terminal == 0.0);
    CHECK(t.integral_expxi == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("path sample invariants") {
    const MapModel m = example31_map();
    for (std::uint64_t i = 0; i < 200; ++i) {
        PhiloxStream rng(7, i);
        const PathSample p = sample_path(m, 0, 1.0, rng);
        for (std::size_t k = 0; k + 1 < p.switch_times.size(); ++k)
            CHECK(p.switch_times[k] < p.switch_times[k + 1]);
        for (std::size_t k = 0; k + 1 < p.regimes.size(); ++k)
            CHECK(p.regimes[k] != p.regimes[k + 1]);
        CHECK(p.integral_expxi >= 0.0);
        CHECK(p.xi_sup >= p.xi_terminal);
        CHECK(p.xi_inf <= 0.0);
        CHECK(p.regimes.size() == p.switch_times.size() + 1);
    }
}

TEST_CASE("switch count distribution matches the alternating-renewal law") {
    // Both holding rates equal q, so N_T is Poisson(qT); chi-square test at
    // the 1% level over pooled bins.
    const MapModel m = example31_map();
    const double q = 1.0, horizon = 1.0;
    const int n_paths = 100000;
    std::map<int, int> counts;
    for (int i = 0; i < n_paths; ++i) {
        PhiloxStream rng(31415, static_cast<std::uint64_t>(i));
        const PathSample p = sample_path(m, 0, horizon, rng);
        counts[static_cast<int>(p.switch_times.size())] += 1;
    }
    const double lambda = q * horizon;
    double chi2 = 0.0;
    int dof = -1;
    double tail_expect = n_paths;
    int tail_observed = n_paths;
    double pmf = std::exp(-lambda);
    for (int k = 0; k <= 6; ++k) {
        const double expect = n_paths * pmf;
        if (expect < 10.0) break;
        const int observed = counts.count(k) ? counts.at(k) : 0;
        chi2 += (observed - expect) * (observed - expect) / expect;
        tail_expect -= expect;
        tail_observed -= observed;
        dof += 1;
        pmf *= lambda / (k + 1);
    }
    if (tail_expect > 10.0) {
        chi2 += (tail_observed - tail_expect) * (tail_observed - tail_expect) / tail_expect;
        dof += 1;
    }
    // 1% critical values for dof 5..8: 15.1, 16.8, 18.5, 20.1.
    CHECK(chi2 < 20.1);
    CHECK(dof >= 5);
}

TEST_CASE("mc_joint_transform against transform_matrix") {
    const MapModel m = example31_map();
    McConfig cfg;
    cfg.n_paths = 100000;
    cfg.seed = 11;

    // z = 0: empirical transition frequencies, rows sum to one exactly.
    const auto freq = mc_joint_transform(m, Complex{0.0}, 1.0, cfg);
    CHECK(freq.mean.row_sum(0).real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(freq.mean.row_sum(1).real() == doctest::Approx(1.0).epsilon(1e-12));

    for (double z : {0.0, 0.5, 1.0}) {
        const auto est = mc_joint_transform(m, Complex{z}, 1.0, cfg);
        const ComplexMatrix exact = transform_matrix(m, 1.0, Complex{z});
        for (std::size_t a = 0; a < 2; ++a) {
            for (std::size_t b = 0; b < 2; ++b) {
                const double se = std::max(est.stderr_(a, b).real(), 1e-12);
                CHECK(std::abs(est.mean(a, b).real() - exact(a, b).real()) <= 4.0 * se);
            }
        }
    }
}

TEST_CASE("lognormal mean of a one-state Brownian model") {
    const MapModel b = brownian_one_state(0.05, 0.3);
    McConfig cfg;
    cfg.n_paths = 200000;
    cfg.seed = 5;
    const auto est = mc_joint_transform(b, Complex{1.0}, 1.0, cfg);
    const double expect = std::exp(0.05 + 0.5 * 0.09);
    CHECK(std::abs(est.mean(0, 0).real() - expect) <= 4.0 * est.stderr_(0, 0).real());
}

TEST_CASE("empirical MGF of a Normal transition jump") {
    // G(1) = e^{1/2} for U ~ N(0,1), estimated from raw samples.
    const JumpLaw law = JumpLaw::normal(0.0, 1.0);
    PhiloxStream rng(99, 0);
    double sum = 0.0, sumsq = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        const double v = std::exp(law.sample(rng));
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK(std::abs(mean - std::exp(0.5)) <= 4.0 * se);
}

TEST_CASE("determinism across worker counts") {
    const MapModel m = example31_map();
    McConfig one;
    one.n_paths = 30000;
    one.seed = 77;
    one.n_workers = 1;
    McConfig four = one;
    four.n_workers = 4;
    const PriceEstimate a = mc_european(m, 0, 1.0, [](double x) { return std::max(x - 1.0, 0.0); },
                                        1.0, one);
    const PriceEstimate b = mc_european(m, 0, 1.0, [](double x) { return std::max(x - 1.0, 0.0); },
                                        1.0, four);
    CHECK(a.value == b.value);  // bit identical
    CHECK(a.error == b.error);

    const PriceEstimate c = mc_asian(m, 0, 1.0, 0.8, 1.0, one);
    const PriceEstimate d = mc_asian(m, 0, 1.0, 0.8, 1.0, four);
    CHECK(c.value == d.value);
}

TEST_CASE("mc_european sanity: deterministic payoff and discounting") {
    const MapModel t = trivial_model(0.1);
    McConfig cfg;
    cfg.n_paths = 100;
    cfg.seed = 1;
    const PriceEstimate p =
        mc_european(t, 0, 1.0, [](double x) { return std::max(x - 0.4, 0.0); }, 1.0, cfg);
    CHECK(p.value == doctest::Approx(0.6 * std::exp(-0.1)).epsilon(1e-14));
    CHECK(p.error == doctest::Approx(0.0));
}

TEST_CASE("mc_asian exact cases") {
    McConfig cfg;
    cfg.n_paths = 100;
    cfg.seed = 1;
    // xi == 0, mean averaging: payoff (1 - k)^+ deterministically.
    const PriceEstimate flat = mc_asian(trivial_model(), 0, 1.0, 0.4, 1.0, cfg);
    CHECK(flat.value == doctest::Approx(0.6).epsilon(1e-14));

    // Pure drift a=1, k=0: e^{-rT} (e^T - 1)/T.
    const MapModel b = brownian_one_state(1.0, 0.0);
    const PriceEstimate drift = mc_asian(b, 0, 1.0, 0.0, 1.0, cfg);
    CHECK(drift.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));

    // Raw averaging scales by T relative to mean averaging.
    const PriceEstimate raw = mc_asian(b, 0, 1.0, 0.0, 2.0, cfg, AsianAveraging::Raw);
    const PriceEstimate mean = mc_asian(b, 0, 1.0, 0.0, 2.0, cfg, AsianAveraging::Mean);
    CHECK(raw.value == doctest::Approx(2.0 * mean.value).epsilon(1e-12));
}

TEST_CASE("coupled counts dominate pathwise") {
    const MapModel m = example31_map();  // uniform rates: counts coincide
    for (std::uint64_t i = 0; i < 2000; ++i) {
        PhiloxStream rng(3, i);
        const auto [n, eta] = coupled_counts(m, 0, 1.0, rng);
        CHECK(n == eta);
    }

    // Heterogeneous rates: strict domination possible, violation never.
    MapModel het({"a", "b"}, {{-0.4, 0.4}, {2.0, -2.0}},
                 {LevyComponent{}, LevyComponent{}}, {}, 0.0);
    std::uint64_t dominated = 0;
    for (std::uint64_t i = 0; i < 20000; ++i) {
        PhiloxStream rng(3, i, 1);
        const auto [n, eta] = coupled_counts(het, 0, 2.0, rng);
        CHECK(n <= eta);
        if (n < eta) dominated += 1;
    }
    CHECK(dominated > 0);

    // T -> 0: both zero.
    PhiloxStream rng(3, 0, 2);
    const auto [n0, e0] = coupled_counts(het, 0, 1e-12, rng);
    CHECK(n0 == 0);
    CHECK(e0 == 0);
}

TEST_CASE("sup tail bound holds on jump models") {
    McConfig cfg;
    cfg.n_paths = 60000;
    cfg.seed = 17;
    const MapModel m = example31_map();
    for (auto [u, u0] : std::initializer_list<std::pair<double, double>>{
             {1.0, 0.5}, {1.0, 0.9}, {2.0, 0.6}}) {
        const TailBoundCheck chk = sup_tail_check(m, 0, 1.0, u, u0, cfg);
        CHECK(chk.margin >= -3.0 * chk.combined_se);
        CHECK(chk.lhs >= 0.0);
        CHECK(chk.rhs >= 0.0);
    }

    // xi == 0: lhs vanishes and the bound is trivial.
    const TailBoundCheck triv = sup_tail_check(trivial_model(), 0, 1.0, 0.5, 0.25, cfg);
    CHECK(triv.lhs == 0.0);
    CHECK(triv.margin >= 0.0);
}

TEST_CASE("martingale MC drift orderings") {
    McConfig cfg;
    cfg.n_paths = 150000;
    cfg.seed = 23;
    auto mean_at = [&](const MapModel& m, double t) {
        return mc_european(m.with_rate(0.0), 0, 1.0, [](double x) { return x; }, t, cfg);
    };

    //

    const MapModel corrected = drift_correct(example31_map());
    for (double t : {0.5, 1.0, 2.0}) {
        const PriceEstimate est = mean_at(corrected, t);
        CHECK(std::abs(est.value - 1.0) <= 3.0 * est.error);
    }

    // Submartingale: E[Y_1] >= E[Y_0.5] within joint noise.
    const MapModel sub = example31_map();
    const PriceEstimate s1 = mean_at(sub, 0.5);
    const PriceEstimate s2 = mean_at(sub, 1.0);
    CHECK(s2.value >= s1.value - 3.0 * (s1.error + s2.error));

    // Supermartingale: reversed.
    const MapModel super = to_map_model(testmodels::skew_example(0.5));
    const PriceEstimate p1 = mean_at(super, 0.5);
    const PriceEstimate p2 = mean_at(super, 1.0);
    CHECK(p2.value <= p1.value + 3.0 * (p1.error + p2.error));
}
