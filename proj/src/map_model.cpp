#include "mapricer/map_model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mapricer/errors.hpp"

namespace mapricer {

void LevyComponent::validate(const std::string& where) const {
    if (!(sigma >= 0.0)) throw Error(where + ": sigma must be >= 0");
    if (!std::isfinite(drift) || !std::isfinite(sigma)) throw Error(where + ": non-finite field");
    for (const auto& jp : jumps) {
        if (!(jp.rate > 0.0)) throw Error(where + ": jump intensity must be > 0");
    }
}

Complex LevyComponent::laplace_exponent(Complex z) const {
    const Strip s = strip();
    if (!s.contains(z.real()))
        throw StripViolation("Levy component", z.real(), s.lo, s.hi);
    return laplace_exponent_unchecked(z);
}

Complex LevyComponent::laplace_exponent_unchecked(Complex z) const {
    Complex psi = drift * z + 0.5 * sigma * sigma * z * z;
    for (const auto& jp : jumps) psi += jp.rate * (jp.law.mgf_unchecked(z) - 1.0);
    return psi;
}

Strip LevyComponent::strip() const {
    Strip s = Strip::whole_line();
    for (const auto& jp : jumps) s = s.intersect(jp.law.strip());
    return s;
}

double LevyComponent::total_jump_rate() const {
    double r = 0.0;
    for (const auto& jp : jumps) r += jp.rate;
    return r;
}

MapModel::MapModel(std::vector<std::string> states, std::vector<std::vector<double>> q,
                   std::vector<LevyComponent> levy,
                   std::map<std::pair<std::size_t, std::size_t>, JumpLaw> trans_jumps, double rate)
    : states_(std::move(states)), q_(std::move(q)), levy_(std::move(levy)), rate_(rate) {
    const std::size_t n = states_.size();
    if (n < 1) throw Error("model needs at least one state");
    if (q_.size() != n || levy_.size() != n) throw Error("q / levy dimension mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (q_[i].size() != n) throw Error("q must be square");
        double off = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (!(q_[i][j] >= 0.0)) throw Error("off-diagonal q entries must be >= 0");
            off += q_[i][j];
        }
        if (std::abs(q_[i][i] + off) > 1e-9 * (1.0 + off))
            throw Error("q rows must sum to zero");
        // Rebuild the diagonal so row sums vanish bitwise.
        q_[i][i] = -off;
        levy_[i].validate("state " + states_[i]);
    }

    // Irreducibility: the digraph of positive rates must be strongly
    // connected (vacuous for one state).
    if (n > 1) {
        auto reach = [&](bool transpose) {
            std::vector<bool> seen(n, false);
            std::vector<std::size_t> stack{0};
            seen[0] = true;
            while (!stack.empty()) {
                const std::size_t v = stack.back();
                stack.pop_back();
                for (std::size_t w = 0; w < n; ++w) {
                    const double r = transpose ? q_[w][v] : q_[v][w];
                    if (v != w && r > 0.0 && !seen[w]) {
                        seen[w] = true;
                        stack.push_back(w);
                    }
                }
            }
            for (bool b : seen)
                if (!b) return false;
            return true;
        };
        if (!reach(false) || !reach(true)) throw Error("chain defined by q is not irreducible");
    }

    trans_jumps_.assign(n, std::vector<JumpLaw>(n, JumpLaw::zero()));
    for (const auto& [key, law] : trans_jumps) {
        const auto [a, b] = key;
        if (a >= n || b >= n || a == b) throw Error("invalid transition jump key");
        trans_jumps_[a][b] = law;
    }

    strip_ = Strip::whole_line();
    for (std::size_t i = 0; i < n; ++i) {
        strip_ = strip_.intersect(levy_[i].strip());
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && q_[i][j] > 0.0) strip_ = strip_.intersect(trans_jumps_[i][j].strip());
        }
    }
}

std::size_t MapModel::state_index(const std::string& label) const {
    for (std::size_t i = 0; i < states_.size(); ++i) {
        if (states_[i] == label) return i;
    }
    throw Error("unknown state label: " + label);
}

MapModel MapModel::with_drifts(const std::vector<double>& drifts) const {
    if (drifts.size() != n_states()) throw Error("drift vector size mismatch");
    MapModel out = *this;
    for (std::size_t i = 0; i < drifts.size(); ++i) out.levy_[i].drift = drifts[i];
    return out;
}

MapModel MapModel::with_rate(double r) const {
    MapModel out = *this;
    out.rate_ = r;
    return out;
}

MapModel MapModel::trivial(double rate) {
    return MapModel({"0"}, {{0.0}}, {LevyComponent{}}, {}, rate);
}

}  // namespace mapricer
