#pragma once

#include <optional>

#include "mapricer/complex_matrix.hpp"
#include "mapricer/map_model.hpp"

namespace mapricer {

// psi_a(z) = log E[exp(z xi_1^{(a)})] for the state-a Levy component.
Complex laplace_exponent(const MapModel& model, std::size_t a, Complex z);

// G_{ab}(z) = E[exp(z U_{ab})] for the a -> b transition jump.
Complex transition_mgf(const MapModel& model, std::size_t a, std::size_t b, Complex z);

// F(z): diagonal psi_a(z) - q_a, off-diagonal q_{ab} G_{ab}(z).
ComplexMatrix matrix_exponent(const MapModel& model, Complex z);

// E[e^{z xi_t}; J_t = b | J_0 = a] = (e^{tF(z)})_{ab}.  Two-state models use
// the closed hyperbolic form, larger ones scaling-and-squaring; the two paths
// cross-validate in the test suite.
ComplexMatrix transform_matrix(const MapModel& model, double t, Complex z);

// General algorithm regardless of state count (always scaling-and-squaring).
ComplexMatrix transform_matrix_pade(const MapModel& model, double t, Complex z);

struct Eigen2 {
    Complex alpha;  // (psi + Delta) / 2, the principal branch
    Complex beta;   // (psi - Delta) / 2
    Complex delta;  // sqrt((psi_+^q - psi_-^q)^2 + 4 q_+ q_- G_+ G_-), Re >= 0
};

// Closed-form eigenvalues of F(z) for |E| = 2.
Eigen2 eigen2(const MapModel& model, Complex z);

// kappa(z): eigenvalue of F(z) with largest real part (real z only; F(z) is
// then a Metzler matrix and kappa its Perron root).
double principal_eigenvalue(const MapModel& model, double z);

// Extended Cramer number.
struct CramerNumber {
    enum class Kind { Root, Zero, Infinite, StripBounded };
    Kind kind;
    double theta;  // finite root when kind == Root; 0 / +inf for the conventions
    std::string diagnostic;

    bool greater_than(double p) const;
    bool known() const { return kind != Kind::StripBounded; }
};

CramerNumber cramer_number(const MapModel& model);

}  // namespace mapricer
