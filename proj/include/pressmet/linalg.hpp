#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pressmet {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A point (or requested configuration) outside the feasible region.
struct InfeasibleError : Error {
    using Error::Error;
};

// An iterative solver failed to reach its tolerance.
struct ConvergenceError : Error {
    using Error::Error;
};

// An enumeration exceeded its node budget.
struct BudgetError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

// Dense row-major matrix.  Everything in this project is tiny (at most a few
// dozen rows), so no attempt is made at blocking or sparsity.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

Matrix matmul(const Matrix& a, const Matrix& b);

// y = A x
std::vector<double> matvec(const Matrix& a, const std::vector<double>& x);

// y^T = x^T A
std::vector<double> vecmat(const std::vector<double>& x, const Matrix& a);

double max_abs(const std::vector<double>& x);

// Solves A x = b by LU with partial pivoting.  Throws ConvergenceError on a
// numerically singular pivot.
std::vector<double> lu_solve(Matrix a, std::vector<double> b);

// Stationary distribution of a row-stochastic matrix by the
// Grassmann-Taksar-Heyman elimination.  Subtraction-free, so each component
// comes out with small relative error even for nearly reducible chains.
std::vector<double> gth_stationary(Matrix t);

}  // namespace pressmet
