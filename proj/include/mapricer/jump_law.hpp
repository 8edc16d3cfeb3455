#pragma once

#include <complex>
#include <string>

#include "mapricer/rng.hpp"
#include "mapricer/strip.hpp"

namespace mapricer {

using Complex = std::complex<double>;

// Distribution of a single jump: either a compound-Poisson jump size or the
// jump U_{ab} applied when the modulating chain switches states.  Each kind
// has an explicit MGF with a known analyticity strip; querying outside the
// strip throws, never returns NaN.
class JumpLaw {
  public:
    enum class Kind { ExponentialPos, ExponentialNeg, Normal, TwoSidedExponential, Degenerate };

    static JumpLaw exponential_pos(double rate);
    static JumpLaw exponential_neg(double rate);
    static JumpLaw normal(double mean, double variance);
    static JumpLaw two_sided_exponential(double rate_pos, double rate_neg, double prob_pos);
    static JumpLaw degenerate(double point);
    static JumpLaw zero() { return degenerate(0.0); }

    Kind kind() const { return kind_; }
    Strip strip() const;

    // E[exp(zU)].  Throws StripViolation when Re(z) leaves the strip.
    Complex mgf(Complex z) const;

    // mgf without the strip check; used on contours whose real part has
    // already been validated.
    Complex mgf_unchecked(Complex z) const;

    // Lebesgue density at x (Degenerate has none; callers must special-case).
    double density(double x) const;

    bool is_zero() const { return kind_ == Kind::Degenerate && a_ == 0.0; }

    double sample(PhiloxStream& rng) const;

    std::string describe() const;

    bool operator==(const JumpLaw&) const = default;

    // Parameter accessors (meaning depends on kind).
    double param_a() const { return a_; }
    double param_b() const { return b_; }
    double param_c() const { return c_; }

  private:
    JumpLaw(Kind kind, double a, double b, double c) : kind_(kind), a_(a), b_(b), c_(c) {}

    Kind kind_;
    // ExponentialPos/Neg: a = rate.  Normal: a = mean, b = variance.
    // TwoSided: a = rate_pos, b = rate_neg, c = prob_pos.  Degenerate: a = point.
    double a_ = 0.0;
    double b_ = 0.0;
    double c_ = 0.0;
};

}  // namespace mapricer
