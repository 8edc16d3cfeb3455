#include "mapricer/reports.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "mapricer/errors.hpp"

namespace mapricer {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

json cramer_to_json(const CramerNumber& theta) {
    json j;
    switch (theta.kind) {
        case CramerNumber::Kind::Root:
            j["kind"] = "root";
            j["theta"] = theta.theta;
            break;
        case CramerNumber::Kind::Zero:
            j["kind"] = "zero";
            j["theta"] = 0.0;
            break;
        case CramerNumber::Kind::Infinite:
            j["kind"] = "infinite";
            break;
        case CramerNumber::Kind::StripBounded:
            j["kind"] = "strip_bounded";
            break;
    }
    if (!theta.diagnostic.empty()) j["diagnostic"] = theta.diagnostic;
    return j;
}

json integrability_to_json(const IntegrabilityReport& rep) {
    return json{{"p", rep.p},
                {"integrable", rep.integrable},
                {"witness", rep.witness},
                {"uniformly_integrable", tri_state_name(rep.uniformly_integrable)}};
}

}  // namespace

std::string price_rows_to_csv(const std::vector<PriceRow>& rows) {
    std::ostringstream os;
    os << "strike,price,err_bound,method\n";
    for (const auto& r : rows)
        os << fmt(r.strike) << "," << fmt(r.price) << "," << fmt(r.err_bound) << ","
           << PriceEstimate::method_name(r.method) << "\n";
    return os.str();
}

std::vector<PriceRow> parse_price_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "strike,price,err_bound,method")
        throw Error("price CSV: bad header");
    std::vector<PriceRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        PriceRow row{};
        std::getline(ls, cell, ',');
        row.strike = std::stod(cell);
        std::getline(ls, cell, ',');
        row.price = std::stod(cell);
        std::getline(ls, cell, ',');
        row.err_bound = std::stod(cell);
        std::getline(ls, cell, ',');
        if (cell == "mellin")
            row.method = PriceEstimate::Method::Mellin;
        else if (cell == "series")
            row.method = PriceEstimate::Method::Series;
        else if (cell == "mc")
            row.method = PriceEstimate::Method::Mc;
        else
            throw Error("price CSV: unknown method '" + cell + "'");
        rows.push_back(row);
    }
    return rows;
}

std::string plot_data_csv(const std::vector<PriceRow>& rows) {
    std::ostringstream os;
    os << "strike,method,value,err\n";
    for (const auto& r : rows)
        os << fmt(r.strike) << "," << PriceEstimate::method_name(r.method) << "," << fmt(r.price)
           << "," << fmt(r.err_bound) << "\n";
    return os.str();
}

ClassificationReport classify_model(const MapModel& model, double tol) {
    ClassificationReport rep;
    rep.integrability_p1 = check_integrability(model, 1.0);
    rep.integrability_p2 = check_integrability(model, 2.0);
    rep.martingale = martingale_class(model, tol);
    rep.theta = rep.integrability_p1.theta;
    const Strip strip = model.strip();
    const double hi = std::isfinite(strip.hi) ? strip.hi : 4.0;
    const double lo = std::isfinite(strip.lo) ? strip.lo : -4.0;
    const int n = 17;
    for (int i = 1; i < n; ++i) {
        const double z = lo + (hi - lo) * i / n;
        if (!strip.contains(z)) continue;
        rep.kappa_grid.emplace_back(z, principal_eigenvalue(model, z));
    }
    return rep;
}

std::string classification_to_json(const MapModel& model, const ClassificationReport& rep) {
    json j;
    j["states"] = model.states();
    j["integrability"] = json::array(
        {integrability_to_json(rep.integrability_p1), integrability_to_json(rep.integrability_p2)});
    json mg;
    mg["generator_values"] = rep.martingale.generator_values;
    mg["classification"] = martingale_class_name(rep.martingale.classification);
    mg["finite"] = rep.martingale.finite;
    if (!rep.martingale.witness.empty()) mg["witness"] = rep.martingale.witness;
    j["martingale"] = mg;
    j["cramer"] = cramer_to_json(rep.theta);
    json grid = json::array();
    for (const auto& [z, k] : rep.kappa_grid) grid.push_back(json::array({z, k}));
    j["kappa_grid"] = grid;
    return j.dump(2);
}

const char* compare_verdict_name(CompareVerdict v) {
    switch (v) {
        case CompareVerdict::AsianCheaper: return "asian_cheaper";
        case CompareVerdict::EuropeanCheaper: return "european_cheaper";
        case CompareVerdict::WithinNoise: return "within_noise";
    }
    return "?";
}

std::string compare_report_to_json(const MapModel& model, const CompareReport& report) {
    json j;
    j["states"] = model.states();
    j["generator_values"] = report.generator_values;
    j["classification"] = martingale_class_name(report.classification);
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back(json{{"strike", r.strike},
                            {"european", r.european},
                            {"european_err", r.european_err},
                            {"asian", r.asian},
                            {"asian_stderr", r.asian_stderr},
                            {"verdict", compare_verdict_name(r.verdict)}});
    }
    j["rows"] = rows;
    if (report.crossing_strike)
        j["crossing_strike"] = *report.crossing_strike;
    else
        j["crossing_strike"] = nullptr;
    return j.dump(2);
}

std::string pide_rows_to_csv(const std::vector<std::array<double, 3>>& rows) {
    std::ostringstream os;
    os << "y,t,residual\n";
    for (const auto& r : rows) os << fmt(r[0]) << "," << fmt(r[1]) << "," << fmt(r[2]) << "\n";
    return os.str();
}

}  // namespace mapricer
