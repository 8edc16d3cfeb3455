#pragma once

#include <functional>
#include <vector>

#include "mapricer/closed_form.hpp"
#include "mapricer/map_core.hpp"
#include "mapricer/map_model.hpp"
#include "mapricer/simulator.hpp"

namespace mapricer {

struct PayoffSpec {
    enum class Kind { Call, Put, Digital, Custom };
    Kind kind = Kind::Call;
    double strike = 1.0;

    // Custom payoffs supply the pointwise function, its Mellin transform and
    // the strip on which the transform is valid.
    std::function<double(double)> payoff;
    std::function<Complex(Complex)> mellin;
    Strip mellin_strip;

    static PayoffSpec call(double strike);
    static PayoffSpec put(double strike);
    static PayoffSpec digital(double strike);
    static PayoffSpec custom(std::function<double(double)> payoff,
                             std::function<Complex(Complex)> mellin, Strip strip);

    double evaluate(double x) const;
    const char* kind_name() const;
};

struct ContourSpec {
    double c = 0.0;          // abscissa
    double half_width = 0.0; // U
    double step = 0.0;       // h; U/step nodes on the half line
};

// Strike-space transforms of call and put prices:
// e^{-rT}/(u(u+1)) sum_b (e^{TF(u+1)})_{ab} on the respective strips.
Complex call_mellin_in_strike(const MapModel& model, std::size_t a, double maturity, Complex u);
Complex put_mellin_in_strike(const MapModel& model, std::size_t a, double maturity, Complex u);

// Vertical-line inversion with the no-event atom split off in closed form.
PriceEstimate price_call(const MapModel& model, std::size_t a, double spot, double strike,
                         double maturity, double tol = 1e-9);
PriceEstimate price_put(const MapModel& model, std::size_t a, double spot, double strike,
                        double maturity, double tol = 1e-9);

// General payoffs through the spot-space transform e^{-rT} MH(z) sum_b e^{TF(-z)}.
PriceEstimate price_general(const MapModel& model, std::size_t a, double spot, double maturity,
                            const PayoffSpec& payoff, double tol = 1e-9);

// Contour selection: midpoint abscissa, half-width doubled until the
// integrand endpoint falls below 1e-12 of its peak, step halved until two
// successive trapezoid refinements agree to tol.
ContourSpec select_contour(const MapModel& model, double maturity, const PayoffSpec& payoff,
                           double tol = 1e-9);

// Price surface sampled by the PIDE checker.  evaluate(a, y, t) returns
// C_H(a, y, t); the rectangle bounds what may be queried and kinks lists
// spot values where the surface loses smoothness (quadrature splits there).
struct PriceGrid {
    std::function<double(std::size_t, double, double)> evaluate;
    double y_lo = 0.0, y_hi = 0.0;
    double t_lo = 0.0, t_hi = 0.0;
    double spacing_y = 1e-3;
    double spacing_t = 1e-3;
    std::vector<double> kinks;
};

// Left-hand side of the pricing PIDE assembled from finite differences and
// quadrature against the jump densities; zero for a true price surface.
double pide_residual(const MapModel& model, std::size_t a, double y, double t,
                     const PriceGrid& grid, double max_spacing_y = 1e-2,
                     double max_spacing_t = 1e-2);

// Call-price grid factory.  Models matching the two-state exponential family
// use the asymptotically corrected inversion (smooth in (y, t) and accurate
// to ~1e-12); other models fall back to price_call.  Evaluations memoised.
// The wide default rectangle matters: the jump quadratures reach far into
// the spot tail and a tight bound truncates them visibly.
PriceGrid call_price_grid(const MapModel& model, double strike, double spacing_y,
                          double spacing_t, double y_lo = 1e-12, double y_hi = 1e12,
                          double t_lo = 1e-4, double t_hi = 10.0);

}  // namespace mapricer
