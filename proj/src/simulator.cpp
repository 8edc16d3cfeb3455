#include "mapricer/simulator.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "mapricer/errors.hpp"

namespace mapricer {

namespace {

constexpr std::size_t kBlock = 8192;

struct SegmentState {
    double xi;
    double integral;
    double sup;
    double inf;
};

// Advance the regime's continuous part (drift + Brownian) over dt, updating
// the pathwise integral of e^xi.  Drift-only intervals integrate exactly.
void advance_continuous(const LevyComponent& lc, double dt, int asian_grid, PhiloxStream& rng,
                        SegmentState& s) {
    if (dt <= 0.0) return;
    if (lc.sigma == 0.0) {
        const double a = lc.drift;
        if (a == 0.0) {
            s.integral += std::exp(s.xi) * dt;
        } else {
            s.integral += std::exp(s.xi) * std::expm1(a * dt) / a;
        }
        s.xi += a * dt;
        s.sup = std::max(s.sup, s.xi);
        s.inf = std::min(s.inf, s.xi);
        return;
    }
    const int m = std::max(1, asian_grid);
    const double ds = dt / m;
    const double vol = lc.sigma * std::sqrt(ds);
    double e0 = std::exp(s.xi);
    for (int i = 0; i < m; ++i) {
        const double xi_next = s.xi + lc.drift * ds + vol * rng.normal();
        const double e1 = std::exp(xi_next);
        s.integral += 0.5 * ds * (e0 + e1);
        s.xi = xi_next;
        e0 = e1;
        s.sup = std::max(s.sup, s.xi);
        s.inf = std::min(s.inf, s.xi);
    }
}

std::size_t pick_next_state(const MapModel& model, std::size_t a, PhiloxStream& rng) {
    const double total = model.total_rate(a);
    double u = rng.uniform() * total;
    for (std::size_t b = 0; b < model.n_states(); ++b) {
        if (b == a) continue;
        u -= model.q(a, b);
        if (u <= 0.0) return b;
    }
    for (std::size_t b = model.n_states(); b-- > 0;) {
        if (b != a && model.q(a, b) > 0.0) return b;
    }
    return a;
}

std::size_t pick_jump_component(const LevyComponent& lc, double total, PhiloxStream& rng) {
    double u = rng.uniform() * total;
    for (std::size_t i = 0; i < lc.jumps.size(); ++i) {
        u -= lc.jumps[i].rate;
        if (u <= 0.0) return i;
    }
    return lc.jumps.size() - 1;
}

}  // namespace

PathSample sample_path(const MapModel& model, std::size_t a0, double horizon, PhiloxStream& rng,
                       int asian_grid) {
    if (!(horizon > 0.0)) throw Error("sample_path requires a positive horizon");
    PathSample out;
    SegmentState s{0.0, 0.0, 0.0, 0.0};
    std::size_t state = a0;
    double t = 0.0;
    out.regimes.push_back(state);

    while (true) {
        const double q = model.total_rate(state);
        const double hold = q > 0.0 ? rng.exponential(q) : std::numeric_limits<double>::infinity();
        const bool switches = t + hold < horizon;
        const double seg_end = switches ? t + hold : horizon;

        // Compound-Poisson events inside the segment, event-driven.
        const LevyComponent& lc = model.levy(state);
        const double cp_rate = lc.total_jump_rate();
        double pos = t;
        if (cp_rate > 0.0) {
            while (true) {
                const double gap = rng.exponential(cp_rate);
                if (pos + gap >= seg_end) break;
                advance_continuous(lc, gap, asian_grid, rng, s);
                const std::size_t comp = pick_jump_component(lc, cp_rate, rng);
                s.xi += lc.jumps[comp].law.sample(rng);
                s.sup = std::max(s.sup, s.xi);
                s.inf = std::min(s.inf, s.xi);
                pos += gap;
            }
        }
        advance_continuous(lc, seg_end - pos, asian_grid, rng, s);

        if (!switches) break;
        const std::size_t next = pick_next_state(model, state, rng);
        s.xi += model.trans_jump(state, next).sample(rng);
        s.sup = std::max(s.sup, s.xi);
        s.inf = std::min(s.inf, s.xi);
        out.switch_times.push_back(seg_end);
        out.xi_at_switches.push_back(s.xi);
        out.regimes.push_back(next);
        state = next;
        t = seg_end;
    }

    out.xi_terminal = s.xi;
    out.j_terminal = state;
    out.integral_expxi = s.integral;
    out.xi_sup = s.sup;
    out.xi_inf = s.inf;
    return out;
}

std::vector<double> mc_accumulate(
    const McConfig& cfg, std::size_t n_values, std::uint32_t stream_salt,
    const std::function<void(std::uint64_t, PhiloxStream&, double*)>& body) {
    const std::uint64_t n = cfg.n_paths;
    const std::size_t n_blocks = static_cast<std::size_t>((n + kBlock - 1) / kBlock);
    std::vector<double> partials(n_blocks * n_values, 0.0);

    std::atomic<std::size_t> next_block{0};
    auto worker = [&]() {
        std::vector<double> slot(n_values);
        while (true) {
            const std::size_t blk = next_block.fetch_add(1);
            if (blk >= n_blocks) return;
            double* acc = partials.data() + blk * n_values;
            const std::uint64_t lo = static_cast<std::uint64_t>(blk) * kBlock;
            const std::uint64_t hi = std::min<std::uint64_t>(lo + kBlock, n);
            for (std::uint64_t p = lo; p < hi; ++p) {
                std::fill(slot.begin(), slot.end(), 0.0);
                PhiloxStream rng(cfg.seed, p, stream_salt);
                body(p, rng, slot.data());
                for (std::size_t k = 0; k < n_values; ++k) acc[k] += slot[k];
            }
        }
    };

    unsigned workers = cfg.n_workers ? cfg.n_workers : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_blocks));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // Blocks combined in index order with compensated summation.
    std::vector<double> total(n_values, 0.0);
    std::vector<double> comp(n_values, 0.0);
    for (std::size_t blk = 0; blk < n_blocks; ++blk) {
        const double* acc = partials.data() + blk * n_values;
        for (std::size_t k = 0; k < n_values; ++k) {
            const double y = acc[k] - comp[k];
            const double t = total[k] + y;
            comp[k] = (t - total[k]) - y;
            total[k] = t;
        }
    }
    return total;
}

JointTransformEstimate mc_joint_transform(const MapModel& model, Complex z, double t,
                                          const McConfig& cfg) {
    const std::size_t n = model.n_states();
    JointTransformEstimate est{ComplexMatrix(n), ComplexMatrix(n)};
    const double denom = static_cast<double>(cfg.n_paths);

    for (std::size_t a0 = 0; a0 < n; ++a0) {
        // Values per path: re, im, re^2, im^2 for each terminal state.
        const std::size_t nv = 4 * n;
        auto sums = mc_accumulate(
            cfg, nv, static_cast<std::uint32_t>(a0),
            [&](std::uint64_t, PhiloxStream& rng, double* out) {
                const PathSample path = sample_path(model, a0, t, rng, cfg.asian_grid);
                const Complex v = std::exp(z * path.xi_terminal);
                double* slot = out + 4 * path.j_terminal;
                slot[0] += v.real();
                slot[1] += v.imag();
                slot[2] += v.real() * v.real();
                slot[3] += v.imag() * v.imag();
            });
        for (std::size_t b = 0; b < n; ++b) {
            const double mre = sums[4 * b] / denom;
            const double mim = sums[4 * b + 1] / denom;
            const double vre = std::max(0.0, sums[4 * b + 2] / denom - mre * mre);
            const double vim = std::max(0.0, sums[4 * b + 3] / denom - mim * mim);
            est.mean(a0, b) = {mre, mim};
            est.stderr_(a0, b) = {std::sqrt(vre / denom), std::sqrt(vim / denom)};
        }
    }
    return est;
}

PriceEstimate mc_european(const MapModel& model, std::size_t a0, double spot,
                          const std::function<double(double)>& payoff, double horizon,
                          const McConfig& cfg) {
    const double disc = std::exp(-model.rate() * horizon);
    auto sums = mc_accumulate(cfg, 2, 101, [&](std::uint64_t, PhiloxStream& rng, double* out) {
        const PathSample path = sample_path(model, a0, horizon, rng, cfg.asian_grid);
        const double v = disc * payoff(spot * std::exp(path.xi_terminal));
        out[0] += v;
        out[1] += v * v;
    });
    const double n = static_cast<double>(cfg.n_paths);
    const double mean = sums[0] / n;
    const double var = std::max(0.0, sums[1] / n - mean * mean);
    return {mean, std::sqrt(var / n), PriceEstimate::Method::Mc};
}

namespace {

PriceEstimate mc_asian_single(const MapModel& model, std::size_t a0, double spot, double strike,
                              double horizon, const McConfig& cfg, AsianAveraging averaging) {
    const double disc = std::exp(-model.rate() * horizon);
    const double scale = averaging == AsianAveraging::Mean ? spot / horizon : spot;
    auto sums = mc_accumulate(cfg, 2, 202, [&](std::uint64_t, PhiloxStream& rng, double* out) {
        const PathSample path = sample_path(model, a0, horizon, rng, cfg.asian_grid);
        const double avg = scale * path.integral_expxi;
        const double v = disc * std::max(avg - strike, 0.0);
        out[0] += v;
        out[1] += v * v;
    });
    const double n = static_cast<double>(cfg.n_paths);
    const double mean = sums[0] / n;
    const double var = std::max(0.0, sums[1] / n - mean * mean);
    return {mean, std::sqrt(var / n), PriceEstimate::Method::Mc};
}

}  // namespace

PriceEstimate mc_asian(const MapModel& model, std::size_t a0, double spot, double strike,
                       double horizon, const McConfig& cfg, AsianAveraging averaging) {
    PriceEstimate est = mc_asian_single(model, a0, spot, strike, horizon, cfg, averaging);
    bool has_brownian = false;
    for (std::size_t a = 0; a < model.n_states(); ++a)
        if (model.levy(a).sigma > 0.0) has_brownian = true;
    if (has_brownian) {
        // Trapezoid bias check: refine the grid once and fold the shift into
        // the reported error.
        McConfig fine = cfg;
        fine.asian_grid = cfg.asian_grid * 2;
        const PriceEstimate refined =
            mc_asian_single(model, a0, spot, strike, horizon, fine, averaging);
        est.error += std::abs(refined.value - est.value);
    }
    return est;
}

std::pair<std::uint64_t, std::uint64_t> coupled_counts(const MapModel& model, std::size_t a0,
                                                       double horizon, PhiloxStream& rng) {
    double lambda_bar = 0.0;
    for (std::size_t a = 0; a < model.n_states(); ++a)
        lambda_bar = std::max(lambda_bar, model.total_rate(a));
    if (lambda_bar <= 0.0) return {0, 0};

    std::uint64_t n_count = 0, eta_count = 0;
    double t_n = 0.0, t_eta = 0.0;
    std::size_t state = a0;
    while (true) {
        const double x = rng.uniform();
        const double neg_log = -std::log(x);
        const double q = model.total_rate(state);
        t_n += neg_log / q;
        t_eta += neg_log / lambda_bar;
        if (t_eta > horizon) break;  // t_n >= t_eta, so both clocks are past T
        eta_count += 1;
        if (t_n <= horizon) n_count += 1;
        state = pick_next_state(model, state, rng);
    }
    return {n_count, eta_count};
}

TailBoundCheck sup_tail_check(const MapModel& model, std::size_t a0, double horizon, double u,
                              double u0, const McConfig& cfg) {
    if (!(u0 > 0.0 && u0 < u)) throw Error("sup_tail_check requires 0 < u0 < u");
    const std::size_t n = model.n_states();
    const double npaths = static_cast<double>(cfg.n_paths);

    auto run_from = [&](std::size_t start) {
        auto sums =
            mc_accumulate(cfg, 3, 300 + static_cast<std::uint32_t>(start),
                          [&](std::uint64_t, PhiloxStream& rng, double* out) {
                              const PathSample p =
                                  sample_path(model, start, horizon, rng, cfg.asian_grid);
                              if (p.xi_sup >= u) out[0] += 1.0;
                              if (p.xi_terminal > u - u0) out[1] += 1.0;
                              if (p.xi_inf >= -u0) out[2] += 1.0;
                          });
        return sums;
    };

    TailBoundCheck check;
    double numer = 0.0, numer_se = 0.0;
    double pmin = 1.0, pmin_se = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        const auto sums = run_from(a);
        const double p_inf = sums[2] / npaths;
        const double se_inf = std::sqrt(std::max(0.0, p_inf * (1.0 - p_inf)) / npaths);
        if (p_inf < pmin) {
            pmin = p_inf;
            pmin_se = se_inf;
        }
        if (a == a0) {
            check.lhs = sums[0] / npaths;
            check.lhs_se = std::sqrt(std::max(0.0, check.lhs * (1.0 - check.lhs)) / npaths);
            numer = sums[1] / npaths;
            numer_se = std::sqrt(std::max(0.0, numer * (1.0 - numer)) / npaths);
        }
    }
    if (pmin <= 0.0) throw Error("sup_tail_check: denominator estimate vanished; raise u0");
    check.rhs = numer / pmin;
    const double rel_num = numer > 0.0 ? numer_se / numer : 0.0;
    const double rel_den = pmin_se / pmin;
    check.rhs_se = check.rhs * std::sqrt(rel_num * rel_num + rel_den * rel_den);
    check.margin = check.rhs - check.lhs;
    check.combined_se = std::sqrt(check.rhs_se * check.rhs_se + check.lhs_se * check.lhs_se);
    return check;
}

}  // namespace mapricer
