#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mapricer/jump_law.hpp"
#include "mapricer/strip.hpp"

namespace mapricer {

// One compound-Poisson jump stream of a Levy component.
struct JumpPart {
    double rate;  // > 0
    JumpLaw law;
};

// Finite-activity Levy triplet: drift + Brownian part + compound Poisson.
struct LevyComponent {
    double drift = 0.0;
    double sigma = 0.0;
    std::vector<JumpPart> jumps;

    void validate(const std::string& where) const;

    // psi(z) = a z + sigma^2 z^2 / 2 + sum rate (mgf(z) - 1)
    Complex laplace_exponent(Complex z) const;
    Complex laplace_exponent_unchecked(Complex z) const;
    Strip strip() const;
    double total_jump_rate() const;
};

// Markov additive model: irreducible finite chain J with generator q, one
// Levy component per state, and a jump law per ordered state transition.
// The risk-free rate is stored alongside for pricing convenience.
class MapModel {
  public:
    MapModel(std::vector<std::string> states, std::vector<std::vector<double>> q,
             std::vector<LevyComponent> levy,
             std::map<std::pair<std::size_t, std::size_t>, JumpLaw> trans_jumps, double rate);

    std::size_t n_states() const { return states_.size(); }
    const std::vector<std::string>& states() const { return states_; }
    std::size_t state_index(const std::string& label) const;

    // Off-diagonal switch rate a -> b; diagonal entries are -q_a, rebuilt
    // bitwise from the off-diagonals so rows sum to zero exactly.
    double q(std::size_t a, std::size_t b) const { return q_[a][b]; }
    double total_rate(std::size_t a) const { return -q_[a][a]; }

    const LevyComponent& levy(std::size_t a) const { return levy_[a]; }
    const JumpLaw& trans_jump(std::size_t a, std::size_t b) const { return trans_jumps_[a][b]; }

    double rate() const { return rate_; }

    // Intersection of every component strip; the domain of F(z).
    Strip strip() const { return strip_; }

    MapModel with_drifts(const std::vector<double>& drifts) const;
    MapModel with_rate(double r) const;

    // Model whose log-price is identically zero (one state, no dynamics).
    static MapModel trivial(double rate = 0.0);

  private:
    std::vector<std::string> states_;
    std::vector<std::vector<double>> q_;
    std::vector<LevyComponent> levy_;
    std::vector<std::vector<JumpLaw>> trans_jumps_;
    double rate_;
    Strip strip_;
};

// JSON model file support.  Parse errors carry the offending document path.
MapModel load_model_json(const std::string& text);
MapModel load_model_file(const std::string& filename);
std::string model_to_json(const MapModel& model);

}  // namespace mapricer
