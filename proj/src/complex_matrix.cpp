#include "mapricer/complex_matrix.hpp"

#include <cmath>
#include <cstdint>

#include "mapricer/errors.hpp"

namespace mapricer {

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& rhs) const {
    ComplexMatrix out(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t k = 0; k < dim_; ++k) {
            const value_type aik = (*this)(i, k);
            if (aik == value_type{}) continue;
            for (std::size_t j = 0; j < dim_; ++j) out(i, j) += aik * rhs(k, j);
        }
    }
    return out;
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& rhs) const {
    ComplexMatrix out(dim_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] + rhs.data_[i];
    return out;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& rhs) const {
    ComplexMatrix out(dim_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] - rhs.data_[i];
    return out;
}

ComplexMatrix& ComplexMatrix::operator*=(value_type s) {
    for (auto& v : data_) v *= s;
    return *this;
}

ComplexMatrix::value_type ComplexMatrix::row_sum(std::size_t i) const {
    value_type s{};
    for (std::size_t j = 0; j < dim_; ++j) s += (*this)(i, j);
    return s;
}

double ComplexMatrix::one_norm() const {
    double best = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) col += std::abs((*this)(i, j));
        best = std::max(best, col);
    }
    return best;
}

double ComplexMatrix::max_abs() const {
    double best = 0.0;
    for (const auto& v : data_) best = std::max(best, std::abs(v));
    return best;
}

bool ComplexMatrix::all_finite() const {
    for (const auto& v : data_) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
}

ComplexMatrix ComplexMatrix::solve(const ComplexMatrix& b) const {
    const std::size_t n = dim_;
    ComplexMatrix a = *this;
    ComplexMatrix x = b;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(a(col, col));
        for (std::size_t i = col + 1; i < n; ++i) {
            const double cand = std::abs(a(i, col));
            if (cand > best) {
                best = cand;
                pivot = i;
            }
        }
        if (best == 0.0) throw NonFinite("singular matrix in linear solve");
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(col, j), a(pivot, j));
                std::swap(x(col, j), x(pivot, j));
            }
        }
        const value_type inv = 1.0 / a(col, col);
        for (std::size_t i = col + 1; i < n; ++i) {
            const value_type f = a(i, col) * inv;
            if (f == value_type{}) continue;
            for (std::size_t j = col; j < n; ++j) a(i, j) -= f * a(col, j);
            for (std::size_t j = 0; j < n; ++j) x(i, j) -= f * x(col, j);
        }
    }
    for (std::size_t col = n; col-- > 0;) {
        const value_type inv = 1.0 / a(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            value_type s = x(col, j);
            for (std::size_t k = col + 1; k < n; ++k) s -= a(col, k) * x(k, j);
            x(col, j) = s * inv;
        }
    }
    return x;
}

ComplexMatrix expm(const ComplexMatrix& a) {
    // Pade-13 coefficients (Higham 2005).
    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    static const double theta13 = 5.371920351148152;

    const std::size_t n = a.dim();
    const double norm = a.one_norm();
    int squarings = 0;
    ComplexMatrix as = a;
    if (norm > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
        as *= std::pow(2.0, -squarings);
    }

    const ComplexMatrix ident = ComplexMatrix::identity(n);
    const ComplexMatrix a2 = as * as;
    const ComplexMatrix a4 = a2 * a2;
    const ComplexMatrix a6 = a2 * a4;

    ComplexMatrix w1 = a6;
    w1 *= b[13];
    {
        ComplexMatrix t = a4;
        t *= b[11];
        w1 = w1 + t;
        t = a2;
        t *= b[9];
        w1 = w1 + t;
    }
    ComplexMatrix w2 = a6;
    w2 *= b[7];
    {
        ComplexMatrix t = a4;
        t *= b[5];
        w2 = w2 + t;
        t = a2;
        t *= b[3];
        w2 = w2 + t;
        t = ident;
        t *= b[1];
        w2 = w2 + t;
    }
    const ComplexMatrix u = as * (a6 * w1 + w2);

    ComplexMatrix z1 = a6;
    z1 *= b[12];
    {
        ComplexMatrix t = a4;
        t *= b[10];
        z1 = z1 + t;
        t = a2;
        t *= b[8];
        z1 = z1 + t;
    }
    ComplexMatrix v = a6 * z1;
    {
        ComplexMatrix t = a6;
        t *= b[6];
        v = v + t;
        t = a4;
        t *= b[4];
        v = v + t;
        t = a2;
        t *= b[2];
        v = v + t;
        t = ident;
        t *= b[0];
        v = v + t;
    }

    ComplexMatrix r = (v - u).solve(v + u);
    for (int i = 0; i < squarings; ++i) r = r * r;
    if (!r.all_finite()) throw NonFinite("matrix exponential overflowed");
    return r;
}

}  // namespace mapricer
