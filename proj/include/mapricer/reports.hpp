#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mapricer/analysis.hpp"
#include "mapricer/simulator.hpp"

namespace mapricer {

// One row of the `price` CSV: strike,price,err_bound,method.
struct PriceRow {
    double strike;
    double price;
    double err_bound;
    PriceEstimate::Method method;
};

std::string price_rows_to_csv(const std::vector<PriceRow>& rows);
std::vector<PriceRow> parse_price_csv(const std::string& text);

// Tidy long-format plot data: strike,method,value,err.
std::string plot_data_csv(const std::vector<PriceRow>& rows);

// Full classification payload of the `classify` command.
struct ClassificationReport {
    IntegrabilityReport integrability_p1;
    IntegrabilityReport integrability_p2;
    MartingaleReport martingale;
    CramerNumber theta{CramerNumber::Kind::StripBounded, 0.0, ""};
    std::vector<std::pair<double, double>> kappa_grid;  // (z, kappa(z))
};

ClassificationReport classify_model(const MapModel& model, double tol = 1e-10);
std::string classification_to_json(const MapModel& model, const ClassificationReport& rep);

enum class CompareVerdict { AsianCheaper, EuropeanCheaper, WithinNoise };

const char* compare_verdict_name(CompareVerdict v);

struct CompareRow {
    double strike;
    double european;
    double european_err;
    double asian;
    double asian_stderr;
    CompareVerdict verdict;
};

struct CompareReport {
    std::vector<double> generator_values;
    MartingaleClass classification = MartingaleClass::Neither;
    std::vector<CompareRow> rows;
    std::optional<double> crossing_strike;
};

std::string compare_report_to_json(const MapModel& model, const CompareReport& report);

// (y, t, residual) triples of the `pide-check` command.
std::string pide_rows_to_csv(const std::vector<std::array<double, 3>>& rows);

}  // namespace mapricer
