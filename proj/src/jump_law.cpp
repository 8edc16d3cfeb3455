#include "mapricer/jump_law.hpp"

#include <cmath>
#include <sstream>

#include "mapricer/errors.hpp"

namespace mapricer {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw Error(std::string("invalid jump law: ") + what);
}

constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;

}  // namespace

StripViolation::StripViolation(std::string component_, double re_z_, double lo_, double hi_)
    : Error("strip violation: Re(z)=" + std::to_string(re_z_) + " outside (" +
            std::to_string(lo_) + ", " + std::to_string(hi_) + ") for " + component_),
      component(std::move(component_)),
      re_z(re_z_),
      lo(lo_),
      hi(hi_) {}

std::string Strip::describe() const {
    std::ostringstream os;
    os << "(" << lo << ", " << hi << ")";
    return os.str();
}

JumpLaw JumpLaw::exponential_pos(double rate) {
    require(rate > 0.0, "ExponentialPos rate must be > 0");
    return JumpLaw(Kind::ExponentialPos, rate, 0.0, 0.0);
}

JumpLaw JumpLaw::exponential_neg(double rate) {
    require(rate > 0.0, "ExponentialNeg rate must be > 0");
    return JumpLaw(Kind::ExponentialNeg, rate, 0.0, 0.0);
}

JumpLaw JumpLaw::normal(double mean, double variance) {
    require(variance >= 0.0, "Normal variance must be >= 0");
    return JumpLaw(Kind::Normal, mean, variance, 0.0);
}

JumpLaw JumpLaw::two_sided_exponential(double rate_pos, double rate_neg, double prob_pos) {
    require(rate_pos > 0.0 && rate_neg > 0.0, "TwoSided rates must be > 0");
    require(prob_pos >= 0.0 && prob_pos <= 1.0, "prob_pos must lie in [0,1]");
    return JumpLaw(Kind::TwoSidedExponential, rate_pos, rate_neg, prob_pos);
}

JumpLaw JumpLaw::degenerate(double point) { return JumpLaw(Kind::Degenerate, point, 0.0, 0.0); }

Strip JumpLaw::strip() const {
    switch (kind_) {
        case Kind::ExponentialPos:
            return {-std::numeric_limits<double>::infinity(), a_};
        case Kind::ExponentialNeg:
            return {-a_, std::numeric_limits<double>::infinity()};
        case Kind::Normal:
        case Kind::Degenerate:
            return Strip::whole_line();
        case Kind::TwoSidedExponential:
            return {-b_, a_};
    }
    return Strip::whole_line();
}

Complex JumpLaw::mgf(Complex z) const {
    const Strip s = strip();
    if (!s.contains(z.real())) throw StripViolation(describe(), z.real(), s.lo, s.hi);
    return mgf_unchecked(z);
}

Complex JumpLaw::mgf_unchecked(Complex z) const {
    switch (kind_) {
        case Kind::ExponentialPos:
            return a_ / (a_ - z);
        case Kind::ExponentialNeg:
            return a_ / (a_ + z);
        case Kind::Normal:
            return std::exp(a_ * z + 0.5 * b_ * z * z);
        case Kind::TwoSidedExponential:
            return c_ * a_ / (a_ - z) + (1.0 - c_) * b_ / (b_ + z);
        case Kind::Degenerate:
            return std::exp(a_ * z);
    }
    return {};
}

double JumpLaw::density(double x) const {
    switch (kind_) {
        case Kind::ExponentialPos:
            return x > 0.0 ? a_ * std::exp(-a_ * x) : 0.0;
        case Kind::ExponentialNeg:
            return x < 0.0 ? a_ * std::exp(a_ * x) : 0.0;
        case Kind::Normal: {
            if (b_ == 0.0) return 0.0;
            const double d = x - a_;
            return kInvSqrt2Pi / std::sqrt(b_) * std::exp(-0.5 * d * d / b_);
        }
        case Kind::TwoSidedExponential:
            return x > 0.0 ? c_ * a_ * std::exp(-a_ * x)
                           : (x < 0.0 ? (1.0 - c_) * b_ * std::exp(b_ * x) : 0.0);
        case Kind::Degenerate:
            return 0.0;
    }
    return 0.0;
}

double JumpLaw::sample(PhiloxStream& rng) const {
    switch (kind_) {
        case Kind::ExponentialPos:
            return rng.exponential(a_);
        case Kind::ExponentialNeg:
            return -rng.exponential(a_);
        case Kind::Normal:
            return a_ + std::sqrt(b_) * rng.normal();
        case Kind::TwoSidedExponential:
            return rng.uniform() < c_ ? rng.exponential(a_) : -rng.exponential(b_);
        case Kind::Degenerate:
            return a_;
    }
    return 0.0;
}

std::string JumpLaw::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::ExponentialPos:
            os << "ExponentialPos(rate=" << a_ << ")";
            break;
        case Kind::ExponentialNeg:
            os << "ExponentialNeg(rate=" << a_ << ")";
            break;
        case Kind::Normal:
            os << "Normal(mean=" << a_ << ", variance=" << b_ << ")";
            break;
        case Kind::TwoSidedExponential:
            os << "TwoSidedExponential(rate_pos=" << a_ << ", rate_neg=" << b_
               << ", prob_pos=" << c_ << ")";
            break;
        case Kind::Degenerate:
            os << "Degenerate(" << a_ << ")";
            break;
    }
    return os.str();
}

}  // namespace mapricer
