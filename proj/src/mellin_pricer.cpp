#include "mapricer/mellin_pricer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <sstream>
#include <unordered_map>

#include "mapricer/errors.hpp"
#include "mapricer/quadrature.hpp"

namespace mapricer {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPoleMargin = 0.05;

void check_pole_distance(Complex u) {
    if (std::abs(u) < 1e-8 || std::abs(u + 1.0) < 1e-8)
        throw PoleProximity("transform evaluated within 1e-8 of a kernel pole (u = 0 or -1)");
}

// No-event atom of the start state: mass w sitting at y0 = e^{aT} whenever
// the state is diffusion free.  Splitting it off leaves a transform that
// actually decays along the contour.
struct AtomPart {
    bool present = false;
    double log_weight = 0.0;  // log w = -(q_a + Lambda_a) T
    double log_y0 = 0.0;      // a_a T
};

AtomPart atom_part(const MapModel& model, std::size_t a, double maturity) {
    AtomPart atom;
    const LevyComponent& lc = model.levy(a);
    if (lc.sigma == 0.0) {
        atom.present = true;
        atom.log_weight = -(model.total_rate(a) + lc.total_jump_rate()) * maturity;
        atom.log_y0 = lc.drift * maturity;
    }
    return atom;
}

// Row sum of e^{TF(s)} minus the atom's contribution w y0^s.
Complex row_transform_sub(const MapModel& model, std::size_t a, double maturity, Complex s,
                          const AtomPart& atom) {
    Complex row = transform_matrix(model, maturity, s).row_sum(a);
    if (atom.present) row -= std::exp(atom.log_weight + atom.log_y0 * s);
    return row;
}

struct QuadResult {
    double value = 0.0;
    double err = 0.0;
    ContourSpec spec;
};

// (1/pi) int_0^inf Re[x^{-(c+iv)} f(c+iv)] dv with endpoint doubling for the
// half-width and trapezoid refinement for the step.  Node layout is fixed by
// the resulting ContourSpec, so repeated calls are bit-stable.
QuadResult invert_half_line(const std::function<Complex(Complex)>& f, double x, double c,
                            double tol) {
    const double log_x = std::log(x);
    auto integrand = [&](double v) {
        const Complex s{c, v};
        const Complex kernel = std::exp(Complex{-c * log_x, -v * log_x});
        return (kernel * f(s)).real();
    };

    double peak = 0.0;
    for (double v : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}) peak = std::max(peak, std::abs(f(Complex{c, v})));
    if (peak == 0.0) return {0.0, 0.0, {c, 0.0, 0.0}};

    double half_width = 16.0;
    while (std::abs(f(Complex{c, half_width})) > 1e-12 * peak && half_width < 2.0e6)
        half_width *= 2.0;
    const double tail_est = std::abs(f(Complex{c, half_width})) * half_width * 0.5 / kPi;

    // Trapezoid with successive halvings, reusing previous nodes.
    int n = 2048;
    double h = half_width / n;
    double sum = 0.5 * (integrand(0.0) + integrand(half_width));
    for (int j = 1; j < n; ++j) sum += integrand(h * j);
    double estimate = sum * h / kPi;
    double prev = estimate;
    double err = std::numeric_limits<double>::infinity();
    for (int level = 0; level < 6; ++level) {
        double odd = 0.0;
        for (int j = 0; j < n; ++j) odd += integrand(h * (j + 0.5));
        n *= 2;
        h *= 0.5;
        sum += odd;
        prev = estimate;
        estimate = sum * h / kPi;
        err = std::abs(estimate - prev) / 3.0;
        if (err < tol * std::max(1.0, std::abs(estimate))) break;
    }
    return {estimate, err + tail_est, {c, half_width, h}};
}

double call_contour_abscissa(const MapModel& model) {
    const Strip strip = model.strip();
    if (!(strip.hi > 1.0 + 2.0 * Strip::kMargin))
        throw NoValidContour("call transform needs E[Y_T^{1+s}] < inf for some s > 0; strip " +
                             strip.describe());
    double c = std::isfinite(strip.hi) ? 0.5 * (strip.hi - 1.0) : 1.5;
    return std::max(c, kPoleMargin);
}

double put_contour_abscissa(const MapModel& model) {
    const Strip strip = model.strip();
    const double s_max = -strip.lo;  // E[Y_T^{-s}] < inf for s < s_max
    if (!(s_max > 1.0 + kPoleMargin))
        throw NoValidContour(
            "put transform needs E[Y_T^{-s}] < inf for some s > 1; the interval (-s, -1) "
            "is empty for strip " +
            strip.describe());
    double c = std::isfinite(strip.lo) ? 0.5 * (strip.lo - 1.0) : -2.0;
    return std::min(std::max(c, strip.lo + 1e-6 - 1.0), -1.0 - kPoleMargin);
}

}  // namespace

PayoffSpec PayoffSpec::call(double strike) {
    if (!(strike > 0.0)) throw Error("call strike must be > 0");
    PayoffSpec p;
    p.kind = Kind::Call;
    p.strike = strike;
    return p;
}

PayoffSpec PayoffSpec::put(double strike) {
    if (!(strike > 0.0)) throw Error("put strike must be > 0");
    PayoffSpec p;
    p.kind = Kind::Put;
    p.strike = strike;
    return p;
}

PayoffSpec PayoffSpec::digital(double strike) {
    if (!(strike > 0.0)) throw Error("digital strike must be > 0");
    PayoffSpec p;
    p.kind = Kind::Digital;
    p.strike = strike;
    return p;
}

PayoffSpec PayoffSpec::custom(std::function<double(double)> payoff,
                              std::function<Complex(Complex)> mellin, Strip strip) {
    if (!payoff || !mellin) throw Error("custom payoff needs both evaluators");
    if (strip.empty()) throw Error("custom payoff must declare a non-empty Mellin strip");
    PayoffSpec p;
    p.kind = Kind::Custom;
    p.payoff = std::move(payoff);
    p.mellin = std::move(mellin);
    p.mellin_strip = strip;
    return p;
}

double PayoffSpec::evaluate(double x) const {
    switch (kind) {
        case Kind::Call: return std::max(x - strike, 0.0);
        case Kind::Put: return std::max(strike - x, 0.0);
        case Kind::Digital: return x > strike ? 1.0 : 0.0;
        case Kind::Custom: return payoff(x);
    }
    return 0.0;
}

const char* PayoffSpec::kind_name() const {
    switch (kind) {
        case Kind::Call: return "call";
        case Kind::Put: return "put";
        case Kind::Digital: return "digital";
        case Kind::Custom: return "custom";
    }
    return "?";
}

Complex call_mellin_in_strike(const MapModel& model, std::size_t a, double maturity, Complex u) {
    check_pole_distance(u);
    const Strip strip = model.strip();
    if (!(u.real() > 0.0) || !strip.contains(u.real() + 1.0))
        throw StripViolation("call strike transform (needs Re(u)+1 strip-interior, Re(u)>0)",
                             u.real(), 0.0, strip.hi - 1.0);
    const Complex row = transform_matrix(model, maturity, u + 1.0).row_sum(a);
    return std::exp(-model.rate() * maturity) * row / (u * (u + 1.0));
}

Complex put_mellin_in_strike(const MapModel& model, std::size_t a, double maturity, Complex u) {
    check_pole_distance(u);
    const Strip strip = model.strip();
    if (!(u.real() < -1.0) || !strip.contains(u.real() + 1.0))
        throw StripViolation("put strike transform (needs Re(u) in (-s, -1))", u.real(),
                             strip.lo - 1.0, -1.0);
    const Complex row = transform_matrix(model, maturity, u + 1.0).row_sum(a);
    return std::exp(-model.rate() * maturity) * row / (u * (u + 1.0));
}

namespace {

PriceEstimate price_vanilla(const MapModel& model, std::size_t a, double spot, double strike,
                            double maturity, double tol, bool is_call) {
    if (!(spot > 0.0) || !(strike > 0.0) || !(maturity > 0.0))
        throw Error("price requires spot, strike and maturity > 0");
    const double c = is_call ? call_contour_abscissa(model) : put_contour_abscissa(model);
    const double k = strike / spot;  // homogeneity: price(y, k) = y * price(1, k/y)
    const AtomPart atom = atom_part(model, a, maturity);
    auto f = [&](Complex u) {
        return row_transform_sub(model, a, maturity, u + 1.0, atom) / (u * (u + 1.0));
    };
    const QuadResult quad = invert_half_line(f, k, c, tol);
    double value = quad.value;
    if (atom.present) {
        const double w = std::exp(atom.log_weight);
        const double y0 = std::exp(atom.log_y0);
        value += is_call ? w * std::max(y0 - k, 0.0) : w * std::max(k - y0, 0.0);
    }
    const double disc = std::exp(-model.rate() * maturity);
    return {std::max(spot * disc * value, 0.0), spot * disc * quad.err,
            PriceEstimate::Method::Mellin};
}

Complex payoff_mellin(const PayoffSpec& payoff, Complex z) {
    switch (payoff.kind) {
        case PayoffSpec::Kind::Call:
        case PayoffSpec::Kind::Put:
            return std::pow(payoff.strike, z + 1.0) / (z * (z + 1.0));
        case PayoffSpec::Kind::Digital:
            return -std::pow(payoff.strike, z) / z;
        case PayoffSpec::Kind::Custom:
            return payoff.mellin(z);
    }
    return {};
}

Strip payoff_strip(const PayoffSpec& payoff) {
    const double inf = std::numeric_limits<double>::infinity();
    switch (payoff.kind) {
        case PayoffSpec::Kind::Call: return {-inf, -1.0};
        case PayoffSpec::Kind::Put: return {0.0, inf};
        case PayoffSpec::Kind::Digital: return {-inf, 0.0};
        case PayoffSpec::Kind::Custom: return payoff.mellin_strip;
    }
    return {};
}

double general_contour_abscissa(const MapModel& model, const PayoffSpec& payoff) {
    const Strip model_strip = model.strip();
    // Re(-z) must be strip-interior.
    const Strip reflected{-model_strip.hi, -model_strip.lo};
    const Strip admissible = reflected.intersect(payoff_strip(payoff));
    if (admissible.empty())
        throw NoValidContour("payoff Mellin strip " + payoff_strip(payoff).describe() +
                             " does not meet the reflected model strip " + reflected.describe());
    double c;
    if (std::isfinite(admissible.lo) && std::isfinite(admissible.hi))
        c = 0.5 * (admissible.lo + admissible.hi);
    else if (std::isfinite(admissible.hi))
        c = admissible.hi - 1.0;
    else if (std::isfinite(admissible.lo))
        c = admissible.lo + 1.0;
    else
        c = payoff.kind == PayoffSpec::Kind::Put ? 1.0 : -1.0 + 0.5;
    // Keep clear of the kernel poles at 0 and -1.
    if (std::abs(c) < kPoleMargin) c = admissible.contains(-kPoleMargin) ? -kPoleMargin : kPoleMargin;
    if (std::abs(c + 1.0) < kPoleMargin)
        c = admissible.contains(-1.0 - kPoleMargin) ? -1.0 - kPoleMargin : -1.0 + kPoleMargin;
    if (!admissible.contains(c))
        throw NoValidContour("admissible interval " + admissible.describe() +
                             " leaves no room away from the kernel poles");
    return c;
}

}  // namespace

PriceEstimate price_call(const MapModel& model, std::size_t a, double spot, double strike,
                         double maturity, double tol) {
    return price_vanilla(model, a, spot, strike, maturity, tol, true);
}

PriceEstimate price_put(const MapModel& model, std::size_t a, double spot, double strike,
                        double maturity, double tol) {
    return price_vanilla(model, a, spot, strike, maturity, tol, false);
}

PriceEstimate price_general(const MapModel& model, std::size_t a, double spot, double maturity,
                            const PayoffSpec& payoff, double tol) {
    if (!(spot > 0.0) || !(maturity > 0.0)) throw Error("price requires spot and maturity > 0");
    const double c = general_contour_abscissa(model, payoff);
    const AtomPart atom = atom_part(model, a, maturity);
    auto f = [&](Complex z) {
        return payoff_mellin(payoff, z) * row_transform_sub(model, a, maturity, -z, atom);
    };
    const QuadResult quad = invert_half_line(f, spot, c, tol);
    double value = quad.value;
    if (atom.present)
        value += std::exp(atom.log_weight) * payoff.evaluate(spot * std::exp(atom.log_y0));
    const double disc = std::exp(-model.rate() * maturity);
    return {std::max(disc * value, 0.0), disc * quad.err, PriceEstimate::Method::Mellin};
}

ContourSpec select_contour(const MapModel& model, double maturity, const PayoffSpec& payoff,
                           double tol) {
    const AtomPart atom = atom_part(model, 0, maturity);
    if (payoff.kind == PayoffSpec::Kind::Call || payoff.kind == PayoffSpec::Kind::Put) {
        const bool is_call = payoff.kind == PayoffSpec::Kind::Call;
        const double c = is_call ? call_contour_abscissa(model) : put_contour_abscissa(model);
        auto f = [&](Complex u) {
            return row_transform_sub(model, 0, maturity, u + 1.0, atom) / (u * (u + 1.0));
        };
        return invert_half_line(f, payoff.strike, c, tol).spec;
    }
    const double c = general_contour_abscissa(model, payoff);
    auto f = [&](Complex z) {
        return payoff_mellin(payoff, z) * row_transform_sub(model, 0, maturity, -z, atom);
    };
    return invert_half_line(f, 1.0, c, tol).spec;
}

namespace {

// Truncation bounds for quadrature against a jump density: beyond these the
// density times a linearly growing price is below ~1e-15.
std::pair<double, double> law_support(const JumpLaw& law, double y, double y_hi) {
    const double cap = std::log(std::max(y_hi / y, 2.0));
    switch (law.kind()) {
        case JumpLaw::Kind::ExponentialPos: {
            const double lam = law.param_a();
            const double decay = std::max(lam - 1.0, 0.1);
            return {0.0, std::min((36.0 + std::max(0.0, std::log(y))) / decay, cap)};
        }
        case JumpLaw::Kind::ExponentialNeg:
            return {-36.0 / law.param_a(), 0.0};
        case JumpLaw::Kind::Normal: {
            const double sd = std::sqrt(std::max(law.param_b(), 1e-300));
            return {law.param_a() - 12.0 * sd, std::min(law.param_a() + 12.0 * sd + 12.0 * sd * sd, cap)};
        }
        case JumpLaw::Kind::TwoSidedExponential: {
            const double up = std::max(law.param_a() - 1.0, 0.1);
            return {-36.0 / law.param_b(), std::min(36.0 / up, cap)};
        }
        case JumpLaw::Kind::Degenerate:
            return {law.param_a(), law.param_a()};
    }
    return {0.0, 0.0};
}

// Integrate f against the law's density over its (truncated) support,
// splitting panels at supplied break points (price kinks, the origin).
double integrate_against_law(const JumpLaw& law, const std::function<double(double)>& f,
                             double y, double y_hi, const std::vector<double>& breaks) {
    if (law.kind() == JumpLaw::Kind::Degenerate) return f(law.param_a());
    auto [lo, hi] = law_support(law, y, y_hi);
    if (!(hi > lo)) return 0.0;
    std::vector<double> pts{lo, hi};
    if (lo < 0.0 && hi > 0.0) pts.push_back(0.0);
    for (double b : breaks)
        if (b > lo && b < hi) pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    double total = 0.0;
    auto g = [&](double u) { return f(u) * law.density(u); };
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i], b = pts[i + 1];
        if (!(b > a)) continue;
        const int panels = std::min(8, std::max(2, static_cast<int>(std::ceil((b - a) / 2.0))));
        const double step = (b - a) / panels;
        for (int p = 0; p < panels; ++p)
            total += gauss_legendre_64(g, a + p * step, a + (p + 1) * step);
    }
    return total;
}

}  // namespace

double pide_residual(const MapModel& model, std::size_t a, double y, double t,
                     const PriceGrid& grid, double max_spacing_y, double max_spacing_t) {
    if (grid.spacing_y > max_spacing_y || grid.spacing_t > max_spacing_t) {
        std::ostringstream os;
        os << "grid spacing (" << grid.spacing_y << ", " << grid.spacing_t
           << ") exceeds requested bounds (" << max_spacing_y << ", " << max_spacing_t << ")";
        throw GridTooCoarse(os.str());
    }
    const double hy = grid.spacing_y;
    const double ht = grid.spacing_t;
    if (y - 2.0 * hy < grid.y_lo || y + 2.0 * hy > grid.y_hi || t + 2.0 * ht > grid.t_hi ||
        t < grid.t_lo)
        throw GridTooCoarse("stencil leaves the price grid rectangle");

    auto c = [&](std::size_t state, double yy, double tt) { return grid.evaluate(state, yy, tt); };
    const double c0 = c(a, y, t);

    // Time derivative: central where possible, one-sided second order at the
    // lower edge (the boundary t = 0 is data, not a stencil point).
    double dct;
    if (t - ht >= grid.t_lo) {
        dct = (c(a, y, t + ht) - c(a, y, t - ht)) / (2.0 * ht);
    } else {
        dct = (-3.0 * c0 + 4.0 * c(a, y, t + ht) - c(a, y, t + 2.0 * ht)) / (2.0 * ht);
    }
    const double dcy = (c(a, y + hy, t) - c(a, y - hy, t)) / (2.0 * hy);
    const double sigma = model.levy(a).sigma;
    double dcyy = 0.0;
    if (sigma > 0.0)
        dcyy = (c(a, y + hy, t) - 2.0 * c0 + c(a, y - hy, t)) / (hy * hy);

    // Drift bracket of the PIDE.  The stated form uses the cutoff triplet
    // (a + sigma^2/2 + int(e^u - 1 - u 1_{|u|<=1}) mu); components here carry
    // the pathwise drift, so the compensators merge and the bracket is
    // exactly psi_a(1) = a + sigma^2/2 + sum rate (mgf(1) - 1).
    const LevyComponent& lc = model.levy(a);
    double drift_coef = lc.drift + 0.5 * sigma * sigma;
    for (const auto& jp : lc.jumps)
        drift_coef += jp.rate * (jp.law.mgf(Complex{1.0}).real() - 1.0);

    double residual = -model.rate() * c0 - dct + dcy * y * drift_coef +
                      0.5 * dcyy * y * y * sigma * sigma;

    std::vector<double> breaks;
    for (double kink : grid.kinks)
        if (kink > 0.0) breaks.push_back(std::log(kink / y));

    for (const auto& jp : lc.jumps) {
        auto f = [&](double u) {
            return c(a, y * std::exp(u), t) - c0 - y * (std::exp(u) - 1.0) * dcy;
        };
        residual += jp.rate * integrate_against_law(jp.law, f, y, grid.y_hi, breaks);
    }
    for (std::size_t g = 0; g < model.n_states(); ++g) {
        if (g == a || model.q(a, g) <= 0.0) continue;
        const JumpLaw& law = model.trans_jump(a, g);
        auto f = [&](double u) { return c(g, y * std::exp(u), t) - c0; };
        residual += model.q(a, g) * integrate_against_law(law, f, y, grid.y_hi, breaks);
    }
    return residual;
}

PriceGrid call_price_grid(const MapModel& model, double strike, double spacing_y,
                          double spacing_t, double y_lo, double y_hi, double t_lo, double t_hi) {
    PriceGrid grid;
    grid.y_lo = y_lo;
    grid.y_hi = y_hi;
    grid.t_lo = t_lo;
    grid.t_hi = t_hi;
    grid.spacing_y = spacing_y;
    grid.spacing_t = spacing_t;
    grid.kinks = {strike};

    auto cache = std::make_shared<std::unordered_map<std::uint64_t, double>>();
    const auto cp = detect_cp_exp(model, 1.0);
    auto key_of = [](std::size_t a, double yy, double tt) {
        std::uint64_t h = a + 0x9E3779B97F4A7C15ull;
        std::uint64_t by;
        std::memcpy(&by, &yy, 8);
        h ^= by + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
        std::memcpy(&by, &tt, 8);
        h ^= by + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
        return h;
    };

    if (cp) {
        CpExpModel base = *cp;
        grid.evaluate = [base, strike, cache, key_of](std::size_t a, double yy, double tt) {
            if (tt <= 0.0) return std::max(yy - strike, 0.0);  // boundary data
            const std::uint64_t key = key_of(a, yy, tt);
            if (auto it = cache->find(key); it != cache->end()) return it->second;
            CpExpModel m = base;
            m.maturity = tt;
            // Homogeneity: C(a, y, t; k) = y * C(a, 1, t; k/y).
            const double value = yy * cp_exp_call_mellin(m, static_cast<int>(a), strike / yy);
            (*cache)[key] = value;
            return value;
        };
    } else {
        MapModel copy = model;
        grid.evaluate = [copy, strike, cache, key_of](std::size_t a, double yy, double tt) {
            if (tt <= 0.0) return std::max(yy - strike, 0.0);
            const std::uint64_t key = key_of(a, yy, tt);
            if (auto it = cache->find(key); it != cache->end()) return it->second;
            const double value = price_call(copy, a, yy, strike, tt, 1e-11).value;
            (*cache)[key] = value;
            return value;
        };
    }
    return grid;
}

}  // namespace mapricer
