#include "mapricer/map_core.hpp"

#include <cmath>
#include <limits>

#include "mapricer/errors.hpp"

namespace mapricer {

namespace {

void check_model_strip(const MapModel& model, double re_z) {
    const Strip s = model.strip();
    if (!s.contains(re_z)) {
        // Name the binding component in the error.
        for (std::size_t a = 0; a < model.n_states(); ++a) {
            const Strip cs = model.levy(a).strip();
            if (!cs.contains(re_z))
                throw StripViolation("Levy component of state " + model.states()[a], re_z, cs.lo,
                                     cs.hi);
            for (std::size_t b = 0; b < model.n_states(); ++b) {
                if (a == b || model.q(a, b) <= 0.0) continue;
                const Strip ts = model.trans_jump(a, b).strip();
                if (!ts.contains(re_z))
                    throw StripViolation("transition jump " + model.states()[a] + "->" +
                                             model.states()[b],
                                         re_z, ts.lo, ts.hi);
            }
        }
        throw StripViolation("model", re_z, s.lo, s.hi);
    }
}

// sinh(x)/x with a series fallback near the origin.
Complex sinhc(Complex x) {
    if (std::abs(x) < 1e-4) {
        const Complex x2 = x * x;
        return 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sinh(x) / x;
}

}  // namespace

Complex laplace_exponent(const MapModel& model, std::size_t a, Complex z) {
    const Strip s = model.levy(a).strip();
    if (!s.contains(z.real()))
        throw StripViolation("Levy component of state " + model.states()[a], z.real(), s.lo, s.hi);
    return model.levy(a).laplace_exponent_unchecked(z);
}

Complex transition_mgf(const MapModel& model, std::size_t a, std::size_t b, Complex z) {
    if (a == b) throw Error("transition_mgf requires a != b");
    const JumpLaw& law = model.trans_jump(a, b);
    const Strip s = law.strip();
    if (!s.contains(z.real()))
        throw StripViolation("transition jump " + model.states()[a] + "->" + model.states()[b],
                             z.real(), s.lo, s.hi);
    return law.mgf_unchecked(z);
}

ComplexMatrix matrix_exponent(const MapModel& model, Complex z) {
    check_model_strip(model, z.real());
    const std::size_t n = model.n_states();
    ComplexMatrix f(n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) {
                f(a, a) = model.levy(a).laplace_exponent_unchecked(z) + model.q(a, a);
            } else if (model.q(a, b) > 0.0) {
                f(a, b) = model.q(a, b) * model.trans_jump(a, b).mgf_unchecked(z);
            }
        }
    }
    return f;
}

Eigen2 eigen2(const MapModel& model, Complex z) {
    if (model.n_states() != 2)
        throw WrongStateCount("eigen2 requires a 2-state model, got " +
                              std::to_string(model.n_states()));
    check_model_strip(model, z.real());
    const Complex psi_p = model.levy(0).laplace_exponent_unchecked(z) - model.total_rate(0);
    const Complex psi_m = model.levy(1).laplace_exponent_unchecked(z) - model.total_rate(1);
    const Complex gp = model.q(0, 1) > 0.0 ? model.trans_jump(0, 1).mgf_unchecked(z) : Complex{1.0};
    const Complex gm = model.q(1, 0) > 0.0 ? model.trans_jump(1, 0).mgf_unchecked(z) : Complex{1.0};
    const Complex diff = psi_p - psi_m;
    Complex delta = std::sqrt(diff * diff + 4.0 * model.q(0, 1) * model.q(1, 0) * gp * gm);
    if (delta.real() < 0.0) delta = -delta;
    const Complex psi = psi_p + psi_m;
    return {0.5 * (psi + delta), 0.5 * (psi - delta), delta};
}

ComplexMatrix transform_matrix_pade(const MapModel& model, double t, Complex z) {
    if (t < 0.0) throw Error("transform_matrix requires t >= 0");
    if (t == 0.0) {
        check_model_strip(model, z.real());
        return ComplexMatrix::identity(model.n_states());
    }
    ComplexMatrix f = matrix_exponent(model, z);
    // Logarithmic norm bound: ||e^{tF}|| <= e^{t mu} with
    // mu = max_i (Re F_ii + sum_{j != i} |F_ij|); imaginary contour parts do
    // not overflow the exponential even when ||F|| is huge.
    double mu = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.dim(); ++i) {
        double row = f(i, i).real();
        for (std::size_t j = 0; j < f.dim(); ++j)
            if (j != i) row += std::abs(f(i, j));
        mu = std::max(mu, row);
    }
    if (t * mu > 700.0)
        throw NonFinite("transform matrix overflow, t*max eigenvalue bound = " +
                        std::to_string(t * mu));
    f *= t;
    return expm(f);
}

ComplexMatrix transform_matrix(const MapModel& model, double t, Complex z) {
    if (model.n_states() != 2) return transform_matrix_pade(model, t, z);
    if (t < 0.0) throw Error("transform_matrix requires t >= 0");
    if (t == 0.0) {
        check_model_strip(model, z.real());
        return ComplexMatrix::identity(2);
    }
    const Eigen2 ev = eigen2(model, z);
    const double grow = t * std::max(ev.alpha.real(), ev.beta.real());
    if (grow > 700.0)
        throw NonFinite("transform matrix overflow, t*max Re eigenvalue = " +
                        std::to_string(grow));

    // e^{tF} = (e^{ta} + e^{tb})/2 I + [(e^{ta} - e^{tb})/(2 Delta)] (2F - psi I);
    // evaluating through the eigenvalue exponentials avoids 0 * inf when the
    // mean exponent underflows while cosh overflows (large contour points).
    const Complex half = 0.5 * t * ev.delta;
    Complex ch, sfac;
    if (std::abs(half) < 1e-4) {
        const Complex amp = std::exp(0.5 * t * (ev.alpha + ev.beta));
        ch = amp * std::cosh(half);
        sfac = amp * sinhc(half) * (0.5 * t);
    } else {
        const Complex ea = std::exp(t * ev.alpha);
        const Complex eb = std::exp(t * ev.beta);
        ch = 0.5 * (ea + eb);
        sfac = (ea - eb) / (2.0 * ev.delta);
    }

    const Complex psi_p = model.levy(0).laplace_exponent_unchecked(z) - model.total_rate(0);
    const Complex psi_m = model.levy(1).laplace_exponent_unchecked(z) - model.total_rate(1);
    const Complex gp = model.q(0, 1) > 0.0 ? model.trans_jump(0, 1).mgf_unchecked(z) : Complex{1.0};
    const Complex gm = model.q(1, 0) > 0.0 ? model.trans_jump(1, 0).mgf_unchecked(z) : Complex{1.0};

    ComplexMatrix e(2);
    e(0, 0) = ch + sfac * (psi_p - psi_m);
    e(0, 1) = sfac * 2.0 * model.q(0, 1) * gp;
    e(1, 0) = sfac * 2.0 * model.q(1, 0) * gm;
    e(1, 1) = ch + sfac * (psi_m - psi_p);
    if (!e.all_finite()) throw NonFinite("transform matrix overflowed");
    return e;
}

double principal_eigenvalue(const MapModel& model, double z) {
    check_model_strip(model, z);
    const std::size_t n = model.n_states();
    if (n == 1) return model.levy(0).laplace_exponent_unchecked(Complex{z}).real();
    if (n == 2) return eigen2(model, Complex{z}).alpha.real();

    // F(z) at real z is Metzler and irreducible, so a diagonal shift makes it
    // a primitive non-negative matrix whose Perron root is the target.
    const ComplexMatrix f = matrix_exponent(model, Complex{z});
    double shift = 1.0;
    for (std::size_t i = 0; i < n; ++i) shift = std::max(shift, 1.0 + std::abs(f(i, i).real()));
    std::vector<double> b(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            b[i * n + j] = f(i, j).real() + (i == j ? shift : 0.0);

    // Power iteration with L1-normalised positive iterates: once sum(v) == 1,
    // the next norm is the Perron-root estimate.
    std::vector<double> v(n, 1.0 / static_cast<double>(n)), w(n, 0.0);
    double lambda = 0.0;
    for (int iter = 0; iter < 200000; ++iter) {
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += b[i * n + j] * v[j];
            w[i] = s;
            norm += s;
        }
        const double prev = lambda;
        lambda = norm;
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
        if (iter > 4 && std::abs(lambda - prev) < 1e-15 * (1.0 + std::abs(lambda))) break;
    }
    return lambda - shift;
}

bool CramerNumber::greater_than(double p) const {
    switch (kind) {
        case Kind::Root:
            return theta > p;
        case Kind::Zero:
            return false;
        case Kind::Infinite:
            return true;
        case Kind::StripBounded:
            return false;
    }
    return false;
}

CramerNumber cramer_number(const MapModel& model) {
    const Strip strip = model.strip();
    const double inf = std::numeric_limits<double>::infinity();
    const bool bounded = std::isfinite(strip.hi);
    const double z_edge = bounded ? strip.hi - 10.0 * Strip::kMargin : 1e6;
    if (z_edge <= 0.0)
        return {CramerNumber::Kind::StripBounded, 0.0, "strip has no positive interior"};

    auto kappa = [&](double z) { return principal_eigenvalue(model, z); };

    // Right derivative sign at 0 decides between theta = 0 and a search.
    const double h0 = std::min({1e-6, z_edge / 8.0, strip.lo < 0.0 ? -strip.lo / 8.0 : 1e-6});
    double slope;
    if (strip.contains(-h0)) {
        slope = (kappa(h0) - kappa(-h0)) / (2.0 * h0);
    } else {
        slope = kappa(h0) / h0;
    }

    if (slope >= 0.0) {
        // kappa convex with kappa(0)=0: non-negative initial slope means
        // kappa > 0 on z > 0, unless kappa vanishes identically.
        bool all_zero = true;
        for (double z : {z_edge * 0.1, z_edge * 0.5, z_edge * 0.9}) {
            if (std::abs(kappa(z)) > 1e-12 * (1.0 + std::abs(z))) {
                all_zero = false;
                break;
            }
        }
        if (all_zero)
            return {CramerNumber::Kind::Infinite, inf, "kappa vanishes identically"};
        return {CramerNumber::Kind::Zero, 0.0, "kappa(z) > 0 for all z > 0"};
    }

    // Bracket a sign change by doubling from 1e-3 toward the strip edge.
    double lo = 0.0, hi = 0.0;
    double z = std::min(1e-3, z_edge / 2.0);
    bool found = false;
    while (true) {
        double k;
        try {
            k = kappa(z);
        } catch (const Error&) {
            break;  // overflow close to the edge
        }
        if (!std::isfinite(k)) break;
        if (k > 0.0) {
            hi = z;
            found = true;
            break;
        }
        lo = z;
        if (z >= z_edge) break;
        z = std::min(z * 2.0, z_edge);
    }
    if (!found) {
        if (bounded)
            return {CramerNumber::Kind::StripBounded, 0.0,
                    "kappa < 0 up to the strip edge " + std::to_string(strip.hi)};
        return {CramerNumber::Kind::Infinite, inf, "kappa(z) < 0 on the admissible range"};
    }

    // Bisection to 1e-10 in z.
    for (int iter = 0; iter < 200 && hi - lo > 1e-10; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (kappa(mid) > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return {CramerNumber::Kind::Root, 0.5 * (lo + hi), ""};
}

}  // namespace mapricer
