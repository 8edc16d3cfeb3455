#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace mapricer {

// Dense square complex matrix, just big enough for |E| x |E| exponents.
class ComplexMatrix {
  public:
    using value_type = std::complex<double>;

    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

    static ComplexMatrix identity(std::size_t dim);

    std::size_t dim() const { return dim_; }

    value_type& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
    const value_type& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

    ComplexMatrix operator*(const ComplexMatrix& rhs) const;
    ComplexMatrix operator+(const ComplexMatrix& rhs) const;
    ComplexMatrix operator-(const ComplexMatrix& rhs) const;
    ComplexMatrix& operator*=(value_type s);

    value_type row_sum(std::size_t i) const;
    double one_norm() const;
    double max_abs() const;
    bool all_finite() const;

    // Solves (*this) X = B by Gaussian elimination with partial pivoting.
    ComplexMatrix solve(const ComplexMatrix& b) const;

    const std::vector<value_type>& data() const { return data_; }

  private:
    std::size_t dim_ = 0;
    std::vector<value_type> data_;
};

// Scaling-and-squaring matrix exponential with the degree-13 rational
// approximant.
ComplexMatrix expm(const ComplexMatrix& a);

}  // namespace mapricer
