#pragma once

#include <functional>

namespace mapricer {

// 64-point Gauss-Legendre rule on [lo, hi].
double gauss_legendre_64(const std::function<double(double)>& f, double lo, double hi);

}  // namespace mapricer
