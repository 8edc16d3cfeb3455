// Command line surface: model loading, pricing, classification, example
// reproduction and the European-vs-Asian comparison report.
//
// Exit codes: 0 ok, 2 invalid input, 3 method inapplicable, 4 verification
// failure.
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mapricer/analysis.hpp"
#include "mapricer/closed_form.hpp"
#include "mapricer/errors.hpp"
#include "mapricer/map_core.hpp"
#include "mapricer/mellin_pricer.hpp"
#include "mapricer/reports.hpp"
#include "mapricer/simulator.hpp"

namespace {

using namespace mapricer;

constexpr int kExitInvalidInput = 2;
constexpr int kExitInapplicable = 3;
constexpr int kExitVerificationFailure = 4;

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    const auto c1 = text.find(':');
    if (c1 != std::string::npos) {
        // lo:hi:n grid
        const auto c2 = text.find(':', c1 + 1);
        if (c2 == std::string::npos) throw Error("grid must be lo:hi:n");
        const double lo = std::stod(text.substr(0, c1));
        const double hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        const int n = std::stoi(text.substr(c2 + 1));
        if (n < 1 || !(hi >= lo)) throw Error("bad grid spec");
        for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
        return out;
    }
    std::istringstream in(text);
    std::string cell;
    while (std::getline(in, cell, ',')) out.push_back(std::stod(cell));
    if (out.empty()) throw Error("empty list");
    return out;
}

void write_output(const std::string& text, const std::string& out_file) {
    if (out_file.empty()) {
        std::cout << text;
    } else {
        std::ofstream of(out_file);
        if (!of) throw Error("cannot write " + out_file);
        of << text;
    }
}

struct CommonOpts {
    std::string model_file;
    std::string state;
    double spot = 1.0;
    double maturity = 1.0;
    std::string strikes = "1.0";
    std::uint64_t paths = 200000;
    std::uint64_t seed = 20240617;
    double tol = 1e-9;
    std::string out;
    bool emit_plot_data = false;
};

std::size_t start_state(const MapModel& model, const std::string& label) {
    if (label.empty()) return 0;
    return model.state_index(label);
}

int cmd_price(const CommonOpts& opt, const std::string& method) {
    const MapModel model = load_model_file(opt.model_file);
    const std::size_t a0 = start_state(model, opt.state);
    const std::vector<double> strikes = parse_doubles(opt.strikes);
    const auto cp = detect_cp_exp(model, opt.maturity);
    const auto skew = detect_skew(model, opt.maturity);
    const bool want_series = method == "series" || method == "all";
    if (method == "series" && !cp && !skew) {
        std::cerr << "price: method=series requires the two-state exponential-jump shape\n";
        return kExitInapplicable;
    }

    McConfig cfg;
    cfg.n_paths = opt.paths;
    cfg.seed = opt.seed;
    std::vector<PriceRow> rows;
    for (double k : strikes) {
        if (method == "mellin" || method == "all") {
            try {
                const PriceEstimate est = price_call(model, a0, opt.spot, k, opt.maturity, opt.tol);
                rows.push_back({k, est.value, est.error, est.method});
            } catch (const NoValidContour& e) {
                std::cerr << "price: mellin inapplicable (" << e.what()
                          << "); falling back to mc\n";
                const PriceEstimate est = mc_european(
                    model, a0, opt.spot, [k](double x) { return std::max(x - k, 0.0); },
                    opt.maturity, cfg);
                rows.push_back({k, est.value, est.error, est.method});
            }
        }
        if (want_series && (cp || skew)) {
            if (cp) {
                const PriceEstimate est =
                    call_price_series(*cp, static_cast<int>(a0), k / opt.spot);
                rows.push_back({k, opt.spot * est.value, opt.spot * est.error, est.method});
            } else {
                const double v = opt.spot * skew_call_price(*skew, k / opt.spot);
                rows.push_back({k, v, 1e-10, PriceEstimate::Method::Series});
            }
        }
        if (method == "mc" || method == "all") {
            const PriceEstimate est = mc_european(
                model, a0, opt.spot, [k](double x) { return std::max(x - k, 0.0); }, opt.maturity,
                cfg);
            rows.push_back({k, est.value, est.error, est.method});
        }
    }
    write_output(opt.emit_plot_data ? plot_data_csv(rows) : price_rows_to_csv(rows), opt.out);
    return 0;
}

int cmd_mc_price(const CommonOpts& opt, int asian_grid, const std::string& averaging) {
    const MapModel model = load_model_file(opt.model_file);
    const std::size_t a0 = start_state(model, opt.state);
    McConfig cfg;
    cfg.n_paths = opt.paths;
    cfg.seed = opt.seed;
    cfg.asian_grid = asian_grid;
    std::vector<PriceRow> rows;
    for (double k : parse_doubles(opt.strikes)) {
        PriceEstimate est;
        if (averaging.empty()) {
            est = mc_european(model, a0, opt.spot,
                              [k](double x) { return std::max(x - k, 0.0); }, opt.maturity, cfg);
        } else {
            est = mc_asian(model, a0, opt.spot, k, opt.maturity, cfg,
                           averaging == "raw" ? AsianAveraging::Raw : AsianAveraging::Mean);
        }
        rows.push_back({k, est.value, est.error, est.method});
    }
    write_output(opt.emit_plot_data ? plot_data_csv(rows) : price_rows_to_csv(rows), opt.out);
    return 0;
}

int cmd_classify(const CommonOpts& opt, double tol, bool discounted_check) {
    MapModel model = load_model_file(opt.model_file);
    if (discounted_check) {
        // Classify e^{-rt} Y_t instead: shift every drift down by r.
        std::vector<double> drifts;
        for (std::size_t i = 0; i < model.n_states(); ++i)
            drifts.push_back(model.levy(i).drift - model.rate());
        model = model.with_drifts(drifts);
    }
    const ClassificationReport rep = classify_model(model, tol);
    write_output(classification_to_json(model, rep) + "\n", opt.out);
    return 0;
}

int cmd_compare(const CommonOpts& opt) {
    const MapModel model = load_model_file(opt.model_file);
    const std::size_t a0 = start_state(model, opt.state);
    McConfig cfg;
    cfg.n_paths = opt.paths;
    cfg.seed = opt.seed;

    CompareReport report;
    report.generator_values = generator_values(model);
    report.classification = martingale_class(model).classification;

    for (double k : parse_doubles(opt.strikes)) {
        PriceEstimate eur;
        try {
            eur = price_call(model, a0, opt.spot, k, opt.maturity, opt.tol);
        } catch (const NoValidContour&) {
            eur = mc_european(model, a0, opt.spot,
                              [k](double x) { return std::max(x - k, 0.0); }, opt.maturity, cfg);
        }
        const PriceEstimate asi =
            mc_asian(model, a0, opt.spot, k, opt.maturity, cfg, AsianAveraging::Mean);
        const double gap = eur.value - asi.value;
        const double noise = 3.0 * (asi.error + eur.error);
        CompareVerdict verdict = CompareVerdict::WithinNoise;
        if (gap > noise)
            verdict = CompareVerdict::AsianCheaper;
        else if (gap < -noise)
            verdict = CompareVerdict::EuropeanCheaper;
        report.rows.push_back({k, eur.value, eur.error, asi.value, asi.error, verdict});
    }

    for (std::size_t i = 0; i + 1 < report.rows.size(); ++i) {
        if (report.rows[i].verdict != report.rows[i + 1].verdict &&
            report.rows[i].verdict != CompareVerdict::WithinNoise &&
            report.rows[i + 1].verdict != CompareVerdict::WithinNoise) {
            report.crossing_strike = report.rows[i + 1].strike;
            break;
        }
    }

    write_output(compare_report_to_json(model, report) + "\n", opt.out);

    // Ordering checks: with all generator values positive the Asian call can
    // never price above the European outside noise; with all negative there
    // must be a strike where the European is cheaper.
    bool all_pos = true, all_neg = true;
    for (double v : report.generator_values) {
        if (!(v > 0.0)) all_pos = false;
        if (!(v < 0.0)) all_neg = false;
    }
    if (all_pos) {
        for (const auto& row : report.rows) {
            if (row.asian - row.european > 3.0 * (row.asian_stderr + row.european_err)) {
                std::cerr << "compare: sub-martingale ordering violated at strike " << row.strike
                          << "\n";
                return kExitVerificationFailure;
            }
        }
    }
    if (all_neg) {
        bool found = false;
        for (const auto& row : report.rows)
            if (row.verdict == CompareVerdict::EuropeanCheaper) found = true;
        if (!found) {
            std::cerr << "compare: super-martingale run found no strike with the European "
                         "cheaper outside noise\n";
            return kExitVerificationFailure;
        }
    }
    return 0;
}

int cmd_example31(const CommonOpts& opt, double q, double lp, double lm) {
    const CpExpModel m{q, lp, lm, opt.maturity, 0.0};
    const MapModel map = to_map_model(m);
    McConfig cfg;
    cfg.n_paths = opt.paths;
    cfg.seed = opt.seed;
    std::ostringstream os;
    os << "strike,price,mc_price,mc_stderr\n";
    for (double k : parse_doubles(opt.strikes)) {
        const double series = call_price_series(m, 0, k).value;
        const PriceEstimate mc = mc_european(
            map, 0, 1.0, [k](double x) { return std::max(x - k, 0.0); }, opt.maturity, cfg);
        os << k << "," << series << "," << mc.value << "," << mc.error << "\n";
    }
    write_output(os.str(), opt.out);
    return 0;
}

int cmd_example32(const CommonOpts& opt, double q) {
    const SkewModel m{q, opt.maturity, 0.0};
    const MapModel map = to_map_model(m);
    McConfig cfg;
    cfg.n_paths = opt.paths;
    cfg.seed = opt.seed;
    std::ostringstream os;
    os << "strike,price,mc_price,mc_stderr\n";
    for (double k : parse_doubles(opt.strikes)) {
        const double series = skew_call_price(m, k);
        const PriceEstimate mc = mc_european(
            map, 0, 1.0, [k](double x) { return std::max(x - k, 0.0); }, opt.maturity, cfg);
        os << k << "," << series << "," << mc.value << "," << mc.error << "\n";
    }
    write_output(os.str(), opt.out);
    return 0;
}

int cmd_simulate(const CommonOpts& opt, std::uint64_t n_paths) {
    const MapModel model = load_model_file(opt.model_file);
    const std::size_t a0 = start_state(model, opt.state);
    std::ostringstream os;
    os << "path,t,J,xi\n";
    for (std::uint64_t p = 0; p < n_paths; ++p) {
        PhiloxStream rng(opt.seed, p, 0);
        const PathSample path = sample_path(model, a0, opt.maturity, rng);
        os << p << ",0," << model.states()[path.regimes[0]] << ",0\n";
        for (std::size_t i = 0; i < path.switch_times.size(); ++i)
            os << p << "," << path.switch_times[i] << "," << model.states()[path.regimes[i + 1]]
               << "," << path.xi_at_switches[i] << "\n";
        os << p << "," << opt.maturity << "," << model.states()[path.j_terminal] << ","
           << path.xi_terminal << "\n";
    }
    write_output(os.str(), opt.out);
    return 0;
}

int cmd_pide_check(const CommonOpts& opt, double strike, double spacing, const std::string& y_list,
                   const std::string& t_list) {
    const MapModel model = load_model_file(opt.model_file);
    const std::size_t a0 = start_state(model, opt.state);
    if (!detect_cp_exp(model, opt.maturity))
        std::cerr << "pide-check: model is outside the two-state exponential family; using the "
                     "generic inversion (slower, looser residuals)\n";
    const PriceGrid grid = call_price_grid(model, strike, spacing, spacing);
    std::vector<std::array<double, 3>> rows;
    for (double t : parse_doubles(t_list)) {
        for (double y : parse_doubles(y_list)) {
            rows.push_back({y, t, pide_residual(model, a0, y, t, grid)});
        }
    }
    write_output(pide_rows_to_csv(rows), opt.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"European and Asian option pricing under regime-switching Levy models"};
    app.require_subcommand(1);

    CommonOpts opt;
    std::string method = "mellin";
    double classify_tol = 1e-10;
    bool discounted_check = false;
    int asian_grid = 64;
    std::string averaging;
    double q31 = 1.0, lp = 2.0, lm = 3.0, q32 = 0.5;
    std::uint64_t sim_paths = 1;
    double pide_strike = 1.0, pide_spacing = 1e-3;
    std::string pide_y = "0.6,0.8,1.25,1.6", pide_t = "0.4,0.7";

    auto add_common = [&](CLI::App* cmd, bool needs_model) {
        if (needs_model) cmd->add_option("--model", opt.model_file, "model JSON file")->required();
        cmd->add_option("--state", opt.state, "initial chain state label (default: first)");
        cmd->add_option("--spot", opt.spot, "initial asset price");
        cmd->add_option("--strikes", opt.strikes, "comma list or lo:hi:n");
        cmd->add_option("--maturity", opt.maturity, "time to maturity T");
        cmd->add_option("--paths", opt.paths, "Monte Carlo path count");
        cmd->add_option("--seed", opt.seed, "Monte Carlo seed");
        cmd->add_option("--tol", opt.tol, "quadrature tolerance");
        cmd->add_option("--out", opt.out, "write output to file instead of stdout");
        cmd->add_flag("--emit-plot-data", opt.emit_plot_data, "tidy long-format CSV");
    };

    CLI::App* price = app.add_subcommand("price", "price European calls");
    add_common(price, true);
    price->add_option("--method", method, "mellin | series | mc | all");

    CLI::App* mcp = app.add_subcommand("mc-price", "Monte Carlo pricing (European or Asian)");
    add_common(mcp, true);
    mcp->add_option("--asian-grid", asian_grid, "substeps per Brownian interval");
    mcp->add_option("--averaging", averaging, "price an Asian call: mean | raw");

    CLI::App* cls = app.add_subcommand("classify", "integrability / martingale report");
    add_common(cls, true);
    cls->add_option("--classify-tol", classify_tol, "zero tolerance on generator values");
    cls->add_flag("--discounted-check", discounted_check,
                  "classify the discounted process (drift shift of -r)");

    CLI::App* cmp = app.add_subcommand("compare", "European vs Asian comparison report");
    add_common(cmp, true);

    CLI::App* ex31 = app.add_subcommand("example31", "two-state exponential-jump closed form");
    add_common(ex31, false);
    ex31->add_option("--q", q31, "switch / jump rate");
    ex31->add_option("--lambda-plus", lp, "jump rate in state +");
    ex31->add_option("--lambda-minus", lm, "jump rate in state -");

    CLI::App* ex32 = app.add_subcommand("example32", "skew-symmetric closed form");
    add_common(ex32, false);
    ex32->add_option("--q", q32, "switch / jump rate");

    CLI::App* sim = app.add_subcommand("simulate", "emit path traces as CSV");
    add_common(sim, true);
    sim->add_option("--n-paths", sim_paths, "number of paths to emit");

    CLI::App* pide = app.add_subcommand("pide-check", "PIDE residuals on the Mellin price grid");
    add_common(pide, true);
    pide->add_option("--strike", pide_strike, "call strike of the price surface");
    pide->add_option("--spacing", pide_spacing, "finite-difference stencil spacing");
    pide->add_option("--y-points", pide_y, "spot probe points");
    pide->add_option("--t-points", pide_t, "maturity probe points");

    CLI11_PARSE(app, argc, argv);

    try {
        if (price->parsed()) return cmd_price(opt, method);
        if (mcp->parsed()) return cmd_mc_price(opt, asian_grid, averaging);
        if (cls->parsed()) return cmd_classify(opt, classify_tol, discounted_check);
        if (cmp->parsed()) return cmd_compare(opt);
        if (ex31->parsed()) return cmd_example31(opt, q31, lp, lm);
        if (ex32->parsed()) return cmd_example32(opt, q32);
        if (sim->parsed()) return cmd_simulate(opt, sim_paths);
        if (pide->parsed()) return cmd_pide_check(opt, pide_strike, pide_spacing, pide_y, pide_t);
    } catch (const ModelParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const Truncated& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInapplicable;
    } catch (const NoValidContour& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInapplicable;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    }
    return 0;
}
