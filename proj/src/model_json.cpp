#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mapricer/errors.hpp"
#include "mapricer/map_model.hpp"

namespace mapricer {

namespace {

using nlohmann::json;

double number_at(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        throw ModelParseError(path + "." + key, "expected a number");
    return j[key].get<double>();
}

JumpLaw parse_law(const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ModelParseError(path, "law must be an object with a string 'kind'");
    const std::string kind = j["kind"].get<std::string>();
    try {
        if (kind == "exp_pos") return JumpLaw::exponential_pos(number_at(j, path, "rate"));
        if (kind == "exp_neg") return JumpLaw::exponential_neg(number_at(j, path, "rate"));
        if (kind == "normal")
            return JumpLaw::normal(number_at(j, path, "mean"), number_at(j, path, "variance"));
        if (kind == "two_sided_exp")
            return JumpLaw::two_sided_exponential(number_at(j, path, "rate_pos"),
                                                  number_at(j, path, "rate_neg"),
                                                  number_at(j, path, "prob_pos"));
        if (kind == "degenerate") return JumpLaw::degenerate(number_at(j, path, "point"));
    } catch (const ModelParseError&) {
        throw;
    } catch (const Error& e) {
        throw ModelParseError(path, e.what());
    }
    throw ModelParseError(path + ".kind", "unknown law kind '" + kind + "'");
}

json law_to_json(const JumpLaw& law) {
    json j;
    switch (law.kind()) {
        case JumpLaw::Kind::ExponentialPos:
            j = {{"kind", "exp_pos"}, {"rate", law.param_a()}};
            break;
        case JumpLaw::Kind::ExponentialNeg:
            j = {{"kind", "exp_neg"}, {"rate", law.param_a()}};
            break;
        case JumpLaw::Kind::Normal:
            j = {{"kind", "normal"}, {"mean", law.param_a()}, {"variance", law.param_b()}};
            break;
        case JumpLaw::Kind::TwoSidedExponential:
            j = {{"kind", "two_sided_exp"},
                 {"rate_pos", law.param_a()},
                 {"rate_neg", law.param_b()},
                 {"prob_pos", law.param_c()}};
            break;
        case JumpLaw::Kind::Degenerate:
            j = {{"kind", "degenerate"}, {"point", law.param_a()}};
            break;
    }
    return j;
}

}  // namespace

MapModel load_model_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const std::exception& e) {
        throw ModelParseError("$", e.what());
    }
    if (!doc.is_object()) throw ModelParseError("$", "top level must be an object");

    if (!doc.contains("states") || !doc["states"].is_array() || doc["states"].empty())
        throw ModelParseError("$.states", "expected a non-empty array of strings");
    std::vector<std::string> states;
    for (std::size_t i = 0; i < doc["states"].size(); ++i) {
        if (!doc["states"][i].is_string())
            throw ModelParseError("$.states[" + std::to_string(i) + "]", "expected a string");
        states.push_back(doc["states"][i].get<std::string>());
    }
    const std::size_t n = states.size();

    if (!doc.contains("q") || !doc["q"].is_array() || doc["q"].size() != n)
        throw ModelParseError("$.q", "expected an " + std::to_string(n) + "-row matrix");
    std::vector<std::vector<double>> q(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        if (!doc["q"][i].is_array() || doc["q"][i].size() != n)
            throw ModelParseError("$.q[" + std::to_string(i) + "]", "row length mismatch");
        for (std::size_t j = 0; j < n; ++j) {
            if (!doc["q"][i][j].is_number())
                throw ModelParseError(
                    "$.q[" + std::to_string(i) + "][" + std::to_string(j) + "]",
                    "expected a number");
            q[i][j] = doc["q"][i][j].get<double>();
        }
    }

    if (!doc.contains("levy") || !doc["levy"].is_object())
        throw ModelParseError("$.levy", "expected an object keyed by state");
    std::vector<LevyComponent> levy(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::string path = "$.levy." + states[i];
        if (!doc["levy"].contains(states[i]))
            throw ModelParseError(path, "missing Levy component for state");
        const json& lj = doc["levy"][states[i]];
        LevyComponent lc;
        lc.drift = number_at(lj, path, "a");
        lc.sigma = number_at(lj, path, "sigma");
        if (lj.contains("jumps")) {
            if (!lj["jumps"].is_array()) throw ModelParseError(path + ".jumps", "expected array");
            for (std::size_t k = 0; k < lj["jumps"].size(); ++k) {
                const std::string jpath = path + ".jumps[" + std::to_string(k) + "]";
                const json& jj = lj["jumps"][k];
                JumpPart part{number_at(jj, jpath, "rate"), parse_law(jj["law"], jpath + ".law")};
                if (!(part.rate > 0.0)) throw ModelParseError(jpath + ".rate", "must be > 0");
                lc.jumps.push_back(std::move(part));
            }
        }
        levy[i] = std::move(lc);
    }

    std::map<std::pair<std::size_t, std::size_t>, JumpLaw> trans;
    if (doc.contains("trans_jumps")) {
        if (!doc["trans_jumps"].is_object())
            throw ModelParseError("$.trans_jumps", "expected an object keyed by 'a->b'");
        for (const auto& [key, val] : doc["trans_jumps"].items()) {
            const std::string path = "$.trans_jumps." + key;
            const auto arrow = key.find("->");
            if (arrow == std::string::npos) throw ModelParseError(path, "key must be 'a->b'");
            const std::string from = key.substr(0, arrow);
            const std::string to = key.substr(arrow + 2);
            std::size_t a = n, b = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (states[i] == from) a = i;
                if (states[i] == to) b = i;
            }
            if (a >= n || b >= n || a == b)
                throw ModelParseError(path, "unknown or degenerate state pair");
            trans.emplace(std::make_pair(a, b), parse_law(val, path));
        }
    }

    if (!doc.contains("r") || !doc["r"].is_number())
        throw ModelParseError("$.r", "expected a number");

    try {
        return MapModel(std::move(states), std::move(q), std::move(levy), std::move(trans),
                        doc["r"].get<double>());
    } catch (const Error& e) {
        throw ModelParseError("$", e.what());
    }
}

MapModel load_model_file(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw Error("cannot open model file: " + filename);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_model_json(ss.str());
}

std::string model_to_json(const MapModel& model) {
    json doc;
    doc["states"] = model.states();
    const std::size_t n = model.n_states();
    json q = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < n; ++j) row.push_back(model.q(i, j));
        q.push_back(row);
    }
    doc["q"] = q;
    json levy = json::object();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& lc = model.levy(i);
        json jumps = json::array();
        for (const auto& jp : lc.jumps)
            jumps.push_back({{"rate", jp.rate}, {"law", law_to_json(jp.law)}});
        levy[model.states()[i]] = {{"a", lc.drift}, {"sigma", lc.sigma}, {"jumps", jumps}};
    }
    doc["levy"] = levy;
    json trans = json::object();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b || model.trans_jump(a, b).is_zero()) continue;
            trans[model.states()[a] + "->" + model.states()[b]] =
                law_to_json(model.trans_jump(a, b));
        }
    }
    doc["trans_jumps"] = trans;
    doc["r"] = model.rate();
    return doc.dump(2);
}

}  // namespace mapricer
