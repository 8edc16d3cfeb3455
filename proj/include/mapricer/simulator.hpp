#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "mapricer/complex_matrix.hpp"
#include "mapricer/map_model.hpp"
#include "mapricer/rng.hpp"

namespace mapricer {

// One Lamperti-Kiu trajectory.  Between switches the path evolves by the
// regime's Levy component; at switches the transition jump is added.
struct PathSample {
    std::vector<double> switch_times;      // strictly increasing, in (0, horizon]
    std::vector<std::size_t> regimes;      // regime on each inter-switch interval
    std::vector<double> xi_at_switches;    // xi immediately after each switch
    double xi_terminal = 0.0;
    std::size_t j_terminal = 0;
    double integral_expxi = 0.0;           // int_0^T e^{xi_s} ds, exact when sigma == 0
    double xi_sup = 0.0;                   // running extremes; exact when sigma == 0,
    double xi_inf = 0.0;                   // grid-conservative otherwise
};

struct McConfig {
    std::uint64_t n_paths = 100000;
    std::uint64_t seed = 20240617;
    unsigned n_workers = 0;  // 0 = hardware concurrency
    int asian_grid = 64;     // substeps per Brownian inter-event interval
};

struct PriceEstimate {
    double value = 0.0;
    double error = 0.0;  // MC standard error or quadrature bound
    enum class Method { Mellin, Series, Mc } method = Method::Mc;

    static const char* method_name(Method m) {
        switch (m) {
            case Method::Mellin: return "mellin";
            case Method::Series: return "series";
            case Method::Mc: return "mc";
        }
        return "?";
    }
};

// Exact simulation of one path: exponential holding times, event-driven
// compound-Poisson jumps, Brownian increments at substep resolution only
// where sigma > 0.
PathSample sample_path(const MapModel& model, std::size_t a0, double horizon, PhiloxStream& rng,
                       int asian_grid = 64);

// Deterministic parallel reduction: per-path contributions are accumulated
// into fixed 8192-path blocks in path order and the blocks combined in
// order, so results are bit-identical for any worker count.
std::vector<double> mc_accumulate(
    const McConfig& cfg, std::size_t n_values, std::uint32_t stream_salt,
    const std::function<void(std::uint64_t, PhiloxStream&, double*)>& body);

struct JointTransformEstimate {
    ComplexMatrix mean;
    ComplexMatrix stderr_;  // componentwise standard errors (re, im)
};

// MC estimate of the full matrix E_a[e^{z xi_t}; J_t = b], one row per start.
JointTransformEstimate mc_joint_transform(const MapModel& model, Complex z, double t,
                                          const McConfig& cfg);

PriceEstimate mc_european(const MapModel& model, std::size_t a0, double spot,
                          const std::function<double(double)>& payoff, double horizon,
                          const McConfig& cfg);

enum class AsianAveraging { Mean, Raw };

PriceEstimate mc_asian(const MapModel& model, std::size_t a0, double spot, double strike,
                       double horizon, const McConfig& cfg,
                       AsianAveraging averaging = AsianAveraging::Mean);

// Renewal coupling: the switch count N_T and a Poisson count eta_T of
// rate max_a q_a built from the same uniforms, so N_T <= eta_T pathwise.
std::pair<std::uint64_t, std::uint64_t> coupled_counts(const MapModel& model, std::size_t a0,
                                                       double horizon, PhiloxStream& rng);

struct TailBoundCheck {
    double lhs = 0.0;       // P(sup xi >= u)
    double lhs_se = 0.0;
    double rhs = 0.0;       // P(xi_T > u - u0) / min_a P_a(inf xi >= -u0)
    double rhs_se = 0.0;
    double margin = 0.0;    // rhs - lhs
    double combined_se = 0.0;
};

TailBoundCheck sup_tail_check(const MapModel& model, std::size_t a0, double horizon, double u,
                              double u0, const McConfig& cfg);

}  // namespace mapricer
