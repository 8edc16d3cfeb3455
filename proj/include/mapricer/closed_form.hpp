#pragma once

#include <optional>

#include "mapricer/map_model.hpp"
#include "mapricer/simulator.hpp"

namespace mapricer {

// Two-state Markov modulated compound Poisson model with exponential jumps:
// a_+- = sigma_+- = 0, common switch rate q, state-a jumps ~ Exp(lambda_a),
// and the same law for the jump taken when leaving state a.
struct CpExpModel {
    double q;             // > 0
    double lambda_plus;   // > 1 so that F(s) exists on a call contour
    double lambda_minus;  // > 1
    double maturity;      // T > 0
    double rate;          // risk-free r

    void validate() const;
    double lambda(int alpha) const { return alpha == 0 ? lambda_plus : lambda_minus; }
};

struct SeriesTruncation {
    double tol = 1e-10;
    int max_terms_per_axis = 200;

    void validate() const;
};

// Skew-symmetric model: both states are compound Poisson of rate q with
// Exp(1)-distributed negative jumps, and the transition jumps share that
// law, so (1,1)^T is a right eigenvector of F and Y is non-increasing.
struct SkewModel {
    double q;         // > 0
    double maturity;  // T > 0
    double rate;

    void validate() const;
};

// Scalars of the residue decomposition; d1, d2, d3, c follow the printed
// formulas, s_star is the pole of the G-ratio kernel.  The D kernel itself
// uses -d3 on k >= 1 (the sign the inversion actually produces; the printed
// one breaks continuity at k = 1).
struct DCoefficients {
    double d1;
    double d2;
    double d3;
    double c;
    double s_star;
};

// alpha: 0 for '+', 1 for '-'.
DCoefficients d_coefficients(const CpExpModel& m, int alpha);

// The residue function D_alpha(k) (both branches).
double d_function(const CpExpModel& m, int alpha, double k);

// Smooth part of R_alpha; the unit atom is carried symbolically by the
// convolution algebra, never evaluated numerically.
double kernel_r_smooth(const CpExpModel& m, int alpha, double k);

// European call price by the triple-series expansion of the convolution
// identity C = 2 D*R_+*R_- + D_{-a} - D_a, discounted by e^{-rT}.
PriceEstimate call_price_series(const CpExpModel& m, int alpha, double strike,
                                const SeriesTruncation& trunc = {});

// At-the-money price via the confluent-hypergeometric form of the series.
PriceEstimate atm_price(const CpExpModel& m, int alpha, const SeriesTruncation& trunc = {});

// Row sum of e^{TF(s)} from the explicit two-term split (X-part plus
// G-difference part); the reference the Mellin transform tests pin against.
Complex cp_exp_row_transform(const CpExpModel& m, int alpha, Complex s);

// High-accuracy Mellin inversion for this model family: the slowly decaying
// 1/s^2..1/s^4 part of the integrand is inverted in closed form and only an
// O(s^-5) remainder is integrated numerically, on a quadrature grid that is
// fixed across calls so prices are smooth functions of (strike, maturity).
// Spot is 1; use homogeneity for other spots.  Used by the PIDE checker.
double cp_exp_call_mellin(const CpExpModel& m, int alpha, double strike);

// Skew-symmetric closed form: zero for k > 1, series in lower incomplete
// gammas for k <= 1.
double skew_call_price(const SkewModel& m, double k, const SeriesTruncation& trunc = {});

// k -> 0 limit of the call, e^{-rT} E[Y_T] = e^{-(r+q)T}.
double skew_price_at_zero(const SkewModel& m);

// MAP equivalents for the Monte Carlo / transform oracles.
MapModel to_map_model(const CpExpModel& m);
MapModel to_map_model(const SkewModel& m);

// Structural detection, used by the CLI to route method=series.
std::optional<CpExpModel> detect_cp_exp(const MapModel& model, double maturity);
std::optional<SkewModel> detect_skew(const MapModel& model, double maturity);

}  // namespace mapricer
