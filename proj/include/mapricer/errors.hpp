#pragma once

#include <stdexcept>
#include <string>

namespace mapricer {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Evaluation requested outside the analyticity strip of an MGF / Laplace
// exponent.  Carries the offending component so callers can report it.
struct StripViolation : Error {
    StripViolation(std::string component_, double re_z_, double lo_, double hi_);
    std::string component;
    double re_z;
    double lo;
    double hi;
};

struct WrongStateCount : Error {
    explicit WrongStateCount(const std::string& what) : Error(what) {}
};

struct NonFinite : Error {
    explicit NonFinite(const std::string& what) : Error(what) {}
};

struct NoValidContour : Error {
    explicit NoValidContour(const std::string& what) : Error(what) {}
};

struct NotIntegrable : Error {
    explicit NotIntegrable(const std::string& what) : Error(what) {}
};

struct PoleProximity : Error {
    explicit PoleProximity(const std::string& what) : Error(what) {}
};

struct GridTooCoarse : Error {
    explicit GridTooCoarse(const std::string& what) : Error(what) {}
};

struct DegenerateDenominator : Error {
    explicit DegenerateDenominator(const std::string& what) : Error(what) {}
};

struct Truncated : Error {
    Truncated(const std::string& what, int max_terms_) : Error(what), max_terms(max_terms_) {}
    int max_terms;
};

struct DivergentParameters : Error {
    explicit DivergentParameters(const std::string& what) : Error(what) {}
};

struct ModelParseError : Error {
    ModelParseError(const std::string& path, const std::string& what)
        : Error("model file error at " + path + ": " + what), json_path(path) {}
    std::string json_path;
};

}  // namespace mapricer
