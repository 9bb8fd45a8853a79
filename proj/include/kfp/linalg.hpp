#pragma once

#include <vector>

namespace kfp {

/// Tridiagonal system solver (Thomas elimination, no pivoting). Factor once,
/// solve many right-hand sides of the same size.
class TridiagonalSolver {
public:
    TridiagonalSolver(std::vector<double> sub, std::vector<double> diag,
                      std::vector<double> sup);
    std::vector<double> solve(const std::vector<double>& rhs) const;
    int size() const { return int(diag_.size()); }

private:
    std::vector<double> sub_, diag_, sup_; // factored in place
};

/// LU factorization of a banded matrix without pivoting. Bands are stored
/// row-wise: band(i, j) valid for |i - j| <= bandwidth.
class BandedLU {
public:
    BandedLU(int n, int bandwidth);
    double& at(int i, int j);
    double at(int i, int j) const;
    void factor();
    /// Solves A x = b and verifies the residual against the original matrix.
    std::vector<double> solve(const std::vector<double>& b,
                              double residual_tol = 1e-12) const;
    int size() const { return n_; }

private:
    int n_, kd_;
    std::vector<double> a_;  // original bands, kept for the residual check
    std::vector<double> lu_; // factored bands
    bool factored_ = false;

    double band(const std::vector<double>& s, int i, int j) const;
    double& band(std::vector<double>& s, int i, int j);
};

/// Dense symmetric positive-definite solver (Cholesky) with residual check.
class CholeskySolver {
public:
    explicit CholeskySolver(std::vector<std::vector<double>> a);
    std::vector<double> solve(const std::vector<double>& b,
                              double residual_tol = 1e-12) const;
    int size() const { return int(a_.size()); }

private:
    std::vector<std::vector<double>> a_; // original
    std::vector<std::vector<double>> l_; // lower factor
};

} // namespace kfp
