#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace rsjd {

/// Dense square complex matrix, row major. Sized for the small generator
/// matrices of the Markov module (a couple of dozen states at most).
class CMatrix {
public:
    CMatrix() = default;
    explicit CMatrix(std::size_t n) : n_(n), data_(n * n) {}

    static CMatrix identity(std::size_t n);

    std::size_t size() const { return n_; }
    std::complex<double>& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const std::complex<double>& operator()(std::size_t i, std::size_t j) const {
        return data_[i * n_ + j];
    }

    CMatrix& operator+=(const CMatrix& rhs);
    CMatrix& operator-=(const CMatrix& rhs);
    CMatrix& operator*=(std::complex<double> s);

    double norm1() const;  // max column sum of absolute values

private:
    std::size_t n_ = 0;
    std::vector<std::complex<double>> data_;
};

CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);

/// Solves A X = B in place via LU with partial pivoting.
CMatrix solve(CMatrix a, CMatrix b);

/// Matrix exponential by scaling and squaring with a fixed Pade(13)
/// approximant and 1-norm based scaling.
CMatrix expm(CMatrix a);

std::vector<std::complex<double>> mat_vec(const CMatrix& a,
                                          const std::vector<std::complex<double>>& x);

}  // namespace rsjd
