#pragma once

#include <string>
#include <vector>

#include "mapricer/map_core.hpp"
#include "mapricer/map_model.hpp"

namespace mapricer {

enum class TriState { Yes, No, Unknown };

const char* tri_state_name(TriState t);

// Outcome of the p-th moment test: E[Y_t^p] < infinity iff F(p) exists iff p
// lies strictly inside every component strip.
struct IntegrabilityReport {
    double p = 1.0;
    bool integrable = false;
    std::string witness;               // "F(p) exists" or the first failing component
    TriState uniformly_integrable = TriState::Unknown;
    CramerNumber theta{CramerNumber::Kind::StripBounded, 0.0, ""};
};

IntegrabilityReport check_integrability(const MapModel& model, double p);

enum class MartingaleClass { Martingale, Submartingale, Supermartingale, Neither };

const char* martingale_class_name(MartingaleClass c);

struct MartingaleReport {
    std::vector<double> generator_values;  // A^{(a)} per state
    MartingaleClass classification = MartingaleClass::Neither;
    bool finite = true;
    std::string witness;  // failing component when finite == false
};

// A^{(a)} = sum_b F(1)_{ab} = psi_a(1) + sum_{b != a} q_ab (G_ab(1) - 1),
// the instantaneous growth rate of E_a[Y_t] at t = 0.
std::vector<double> generator_values(const MapModel& model);

MartingaleReport martingale_class(const MapModel& model, double tol = 1e-10);

// Shifts each drift by -A^{(a)} so the generator values vanish; only drifts
// change and the result classifies as a martingale.
MapModel drift_correct(const MapModel& model);

}  // namespace mapricer
