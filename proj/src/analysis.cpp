#include "mapricer/analysis.hpp"

#include <cmath>

#include "mapricer/errors.hpp"

namespace mapricer {

const char* tri_state_name(TriState t) {
    switch (t) {
        case TriState::Yes: return "yes";
        case TriState::No: return "no";
        case TriState::Unknown: return "unknown";
    }
    return "?";
}

const char* martingale_class_name(MartingaleClass c) {
    switch (c) {
        case MartingaleClass::Martingale: return "martingale";
        case MartingaleClass::Submartingale: return "submartingale";
        case MartingaleClass::Supermartingale: return "supermartingale";
        case MartingaleClass::Neither: return "neither";
    }
    return "?";
}

namespace {

// First component whose strip excludes p, if any.
std::string failing_component(const MapModel& model, double p) {
    for (std::size_t a = 0; a < model.n_states(); ++a) {
        if (!model.levy(a).strip().contains(p))
            return "Levy component of state " + model.states()[a] + " (strip " +
                   model.levy(a).strip().describe() + ")";
        for (std::size_t b = 0; b < model.n_states(); ++b) {
            if (a == b || model.q(a, b) <= 0.0) continue;
            if (!model.trans_jump(a, b).strip().contains(p))
                return "transition jump " + model.states()[a] + "->" + model.states()[b] +
                       " (strip " + model.trans_jump(a, b).strip().describe() + ")";
        }
    }
    return "";
}

}  // namespace

IntegrabilityReport check_integrability(const MapModel& model, double p) {
    if (!(p > 0.0)) throw Error("check_integrability requires p > 0");
    IntegrabilityReport rep;
    rep.p = p;
    const std::string fail = failing_component(model, p);
    rep.integrable = fail.empty();
    rep.witness = rep.integrable ? "F(p) exists" : fail;
    rep.theta = cramer_number(model);
    if (!rep.integrable) {
        // Uniform integrability of Y^p implies integrability.
        rep.uniformly_integrable = TriState::No;
    } else if (rep.theta.known()) {
        rep.uniformly_integrable = rep.theta.greater_than(p) ? TriState::Yes : TriState::No;
    } else {
        rep.uniformly_integrable = TriState::Unknown;
    }
    return rep;
}

std::vector<double> generator_values(const MapModel& model) {
    if (!model.strip().contains(1.0)) {
        throw NotIntegrable("F(1) does not exist: " + failing_component(model, 1.0));
    }
    const ComplexMatrix f = matrix_exponent(model, Complex{1.0});
    std::vector<double> a(model.n_states());
    for (std::size_t i = 0; i < model.n_states(); ++i) a[i] = f.row_sum(i).real();
    return a;
}

MartingaleReport martingale_class(const MapModel& model, double tol) {
    MartingaleReport rep;
    if (!model.strip().contains(1.0)) {
        rep.finite = false;
        rep.witness = failing_component(model, 1.0);
        rep.classification = MartingaleClass::Neither;
        return rep;
    }
    rep.generator_values = generator_values(model);
    bool all_zero = true, all_nonneg = true, all_nonpos = true;
    for (double v : rep.generator_values) {
        if (std::abs(v) > tol) all_zero = false;
        if (v < -tol) all_nonneg = false;
        if (v > tol) all_nonpos = false;
    }
    if (all_zero)
        rep.classification = MartingaleClass::Martingale;
    else if (all_nonneg)
        rep.classification = MartingaleClass::Submartingale;
    else if (all_nonpos)
        rep.classification = MartingaleClass::Supermartingale;
    else
        rep.classification = MartingaleClass::Neither;
    return rep;
}

MapModel drift_correct(const MapModel& model) {
    const std::vector<double> a = generator_values(model);
    std::vector<double> drifts(model.n_states());
    for (std::size_t i = 0; i < model.n_states(); ++i) drifts[i] = model.levy(i).drift - a[i];
    return model.with_drifts(drifts);
}

}  // namespace mapricer
