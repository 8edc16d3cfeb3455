#include "mapricer/quadrature.hpp"

#include <array>
#include <cmath>

namespace mapricer {

namespace {

struct Gl64 {
    std::array<double, 64> nodes;
    std::array<double, 64> weights;

    // Nodes from Newton iteration on P_64; standard construction.
    Gl64() {
        const int n = 64;
        for (int i = 0; i < n / 2; ++i) {
            double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                pp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / pp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            const double w = 2.0 / ((1.0 - x * x) * pp * pp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
    }
};

const Gl64& table() {
    static const Gl64 t;
    return t;
}

}  // namespace

double gauss_legendre_64(const std::function<double(double)>& f, double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    const Gl64& t = table();
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double sum = 0.0;
    for (int i = 0; i < 64; ++i) sum += t.weights[i] * f(mid + half * t.nodes[i]);
    return sum * half;
}

}  // namespace mapricer
