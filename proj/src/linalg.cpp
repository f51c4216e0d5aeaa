#include "pressmet/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace pressmet {

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw Error("matmul: dimension mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
    if (a.cols() != x.size()) throw Error("matvec: dimension mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

std::vector<double> vecmat(const std::vector<double>& x, const Matrix& a) {
    if (a.rows() != x.size()) throw Error("vecmat: dimension mismatch");
    std::vector<double> y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += xi * a(i, j);
    }
    return y;
}

double max_abs(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> lu_solve(Matrix a, std::vector<double> b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw Error("lu_solve: dimension mismatch");
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (std::abs(a(piv, k)) < 1e-300)
            throw ConvergenceError("lu_solve: singular matrix");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = a(i, k) / a(k, k);
            if (m == 0.0) continue;
            a(i, k) = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= m * a(k, j);
            b[i] -= m * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * x[j];
        x[ii] = s / a(ii, ii);
    }
    return x;
}

std::vector<double> gth_stationary(Matrix t) {
    const std::size_t n = t.rows();
    if (t.cols() != n || n == 0) throw Error("gth_stationary: bad matrix");
    // Censor states from the back; all updates are sums and products of
    // nonnegative numbers.
    for (std::size_t k = n; k-- > 1;) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += t(k, j);
        if (s <= 0.0) throw ConvergenceError("gth_stationary: reducible chain");
        for (std::size_t i = 0; i < k; ++i) t(i, k) /= s;
        for (std::size_t i = 0; i < k; ++i) {
            const double tik = t(i, k);
            if (tik == 0.0) continue;
            for (std::size_t j = 0; j < k; ++j) t(i, j) += tik * t(k, j);
        }
    }
    std::vector<double> p(n, 0.0);
    p[0] = 1.0;
    double total = 1.0;
    for (std::size_t k = 1; k < n; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i) s += p[i] * t(i, k);
        p[k] = s;
        total += s;
    }
    for (double& v : p) v /= total;
    return p;
}

}  // namespace pressmet
