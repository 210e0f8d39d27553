#include "rsjd/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace rsjd {

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix& CMatrix::operator+=(const CMatrix& rhs) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& rhs) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
    return *this;
}

CMatrix& CMatrix::operator*=(std::complex<double> s) {
    for (auto& v : data_) v *= s;
    return *this;
}

double CMatrix::norm1() const {
    double best = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < n_; ++i) col += std::abs((*this)(i, j));
        best = std::max(best, col);
    }
    return best;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    const std::size_t n = a.size();
    CMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const auto aik = a(i, k);
            if (aik == std::complex<double>(0.0)) continue;
            for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }

CMatrix solve(CMatrix a, CMatrix b) {
    const std::size_t n = a.size();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(a(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(a(r, col));
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0) throw std::runtime_error("solve: singular matrix");
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(col, j), a(pivot, j));
                std::swap(b(col, j), b(pivot, j));
            }
        }
        const auto inv = 1.0 / a(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const auto f = a(r, col) * inv;
            if (f == std::complex<double>(0.0)) continue;
            for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            for (std::size_t j = 0; j < n; ++j) b(r, j) -= f * b(col, j);
        }
    }
    // back substitution
    for (std::size_t col = n; col-- > 0;) {
        const auto inv = 1.0 / a(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            auto acc = b(col, j);
            for (std::size_t k = col + 1; k < n; ++k) acc -= a(col, k) * b(k, j);
            b(col, j) = acc * inv;
        }
    }
    return b;
}

CMatrix expm(CMatrix a) {
    // Higham's fixed Pade(13) with 1-norm scaling.
    static const double kTheta13 = 5.371920351148152;
    static const double b[14] = {64764752532480000.0,
                                 32382376266240000.0,
                                 7771770303897600.0,
                                 1187353796428800.0,
                                 129060195264000.0,
                                 10559470521600.0,
                                 670442572800.0,
                                 33522128640.0,
                                 1323241920.0,
                                 40840800.0,
                                 960960.0,
                                 16380.0,
                                 182.0,
                                 1.0};
    const std::size_t n = a.size();
    const double norm = a.norm1();
    if (!std::isfinite(norm) || norm > 1e12)
        throw std::runtime_error("expm: matrix norm out of range (1-norm = " +
                                 std::to_string(norm) + ")");

    int squarings = 0;
    if (norm > kTheta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
        a *= std::pow(2.0, -squarings);
    }

    const CMatrix I = CMatrix::identity(n);
    const CMatrix a2 = a * a;
    const CMatrix a4 = a2 * a2;
    const CMatrix a6 = a2 * a4;

    CMatrix w1 = a6;
    w1 *= b[13];
    {
        CMatrix t = a4;
        t *= b[11];
        w1 += t;
        t = a2;
        t *= b[9];
        w1 += t;
    }
    CMatrix w2 = a6;
    w2 *= b[7];
    {
        CMatrix t = a4;
        t *= b[5];
        w2 += t;
        t = a2;
        t *= b[3];
        w2 += t;
        t = I;
        t *= b[1];
        w2 += t;
    }
    const CMatrix u = a * (a6 * w1 + w2);

    CMatrix z1 = a6;
    z1 *= b[12];
    {
        CMatrix t = a4;
        t *= b[10];
        z1 += t;
        t = a2;
        t *= b[8];
        z1 += t;
    }
    CMatrix v = a6 * z1;
    {
        CMatrix t = a6;
        t *= b[6];
        v += t;
        t = a4;
        t *= b[4];
        v += t;
        t = a2;
        t *= b[2];
        v += t;
        t = I;
        t *= b[0];
        v += t;
    }

    CMatrix r = solve(v - u, v + u);
    for (int s = 0; s < squarings; ++s) r = r * r;
    return r;
}

std::vector<std::complex<double>> mat_vec(const CMatrix& a,
                                          const std::vector<std::complex<double>>& x) {
    const std::size_t n = a.size();
    std::vector<std::complex<double>> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) y[i] += a(i, j) * x[j];
    return y;
}

}  // namespace rsjd
