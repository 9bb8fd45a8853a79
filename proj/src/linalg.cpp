#include "kfp/linalg.hpp"
#include "kfp/errors.hpp"

#include <cmath>

namespace kfp {

TridiagonalSolver::TridiagonalSolver(std::vector<double> sub, std::vector<double> diag,
                                     std::vector<double> sup)
    : sub_(std::move(sub)), diag_(std::move(diag)), sup_(std::move(sup)) {
    const size_t n = diag_.size();
    if (sub_.size() != n || sup_.size() != n)
        throw ConfigError("TridiagonalSolver: band lengths must match (sub[0], sup[n-1] unused)");
    // forward elimination factors stored in place: diag -> pivots, sub -> multipliers
    for (size_t i = 1; i < n; ++i) {
        if (diag_[i - 1] == 0.0) throw SolverError("TridiagonalSolver: zero pivot");
        const double m = sub_[i] / diag_[i - 1];
        sub_[i] = m;
        diag_[i] -= m * sup_[i - 1];
    }
    if (n > 0 && diag_[n - 1] == 0.0) throw SolverError("TridiagonalSolver: zero pivot");
}

std::vector<double> TridiagonalSolver::solve(const std::vector<double>& rhs) const {
    const size_t n = diag_.size();
    if (rhs.size() != n) throw ConfigError("TridiagonalSolver: rhs size mismatch");
    std::vector<double> x(rhs);
    for (size_t i = 1; i < n; ++i) x[i] -= sub_[i] * x[i - 1];
    x[n - 1] /= diag_[n - 1];
    for (size_t i = n - 1; i-- > 0;) x[i] = (x[i] - sup_[i] * x[i + 1]) / diag_[i];
    return x;
}

BandedLU::BandedLU(int n, int bandwidth)
    : n_(n), kd_(bandwidth), a_(size_t(n) * (2 * bandwidth + 1), 0.0), lu_(a_) {}

double& BandedLU::band(std::vector<double>& s, int i, int j) {
    return s[size_t(i) * (2 * kd_ + 1) + (j - i + kd_)];
}

double BandedLU::band(const std::vector<double>& s, int i, int j) const {
    if (j < 0 || j >= n_ || std::abs(i - j) > kd_) return 0.0;
    return s[size_t(i) * (2 * kd_ + 1) + (j - i + kd_)];
}

double& BandedLU::at(int i, int j) {
    if (i < 0 || i >= n_ || j < 0 || j >= n_ || std::abs(i - j) > kd_)
        throw ConfigError("BandedLU: index outside band");
    factored_ = false;
    return band(a_, i, j);
}

double BandedLU::at(int i, int j) const { return band(a_, i, j); }

void BandedLU::factor() {
    lu_ = a_;
    for (int k = 0; k < n_; ++k) {
        const double piv = band(lu_, k, k);
        if (piv == 0.0) throw SolverError("BandedLU: zero pivot without pivoting");
        for (int i = k + 1; i <= std::min(k + kd_, n_ - 1); ++i) {
            const double m = band(lu_, i, k) / piv;
            band(lu_, i, k) = m;
            for (int j = k + 1; j <= std::min(k + kd_, n_ - 1); ++j)
                band(lu_, i, j) -= m * band(lu_, k, j);
        }
    }
    factored_ = true;
}

std::vector<double> BandedLU::solve(const std::vector<double>& b, double residual_tol) const {
    if (!factored_) throw SolverError("BandedLU: factor() before solve()");
    if (int(b.size()) != n_) throw ConfigError("BandedLU: rhs size mismatch");
    std::vector<double> x(b);
    for (int i = 0; i < n_; ++i)
        for (int j = std::max(0, i - kd_); j < i; ++j) x[i] -= band(lu_, i, j) * x[j];
    for (int i = n_ - 1; i >= 0; --i) {
        for (int j = i + 1; j <= std::min(i + kd_, n_ - 1); ++j)
            x[i] -= band(lu_, i, j) * x[j];
        x[i] /= band(lu_, i, i);
    }
    // componentwise backward-error check against the unfactored bands
    for (int i = 0; i < n_; ++i) {
        double r = -b[i], scale = std::abs(b[i]);
        for (int j = std::max(0, i - kd_); j <= std::min(i + kd_, n_ - 1); ++j) {
            r += band(a_, i, j) * x[j];
            scale += std::abs(band(a_, i, j) * x[j]);
        }
        if (std::abs(r) > residual_tol * std::max(1e-30, scale))
            throw SolverError("BandedLU: residual check failed");
    }
    return x;
}

CholeskySolver::CholeskySolver(std::vector<std::vector<double>> a) : a_(std::move(a)) {
    const size_t n = a_.size();
    l_.assign(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
        if (a_[i].size() != n) throw ConfigError("CholeskySolver: matrix not square");
        for (size_t j = 0; j <= i; ++j) {
            double s = a_[i][j];
            for (size_t k = 0; k < j; ++k) s -= l_[i][k] * l_[j][k];
            if (i == j) {
                if (!(s > 0.0)) throw SolverError("CholeskySolver: matrix not positive definite");
                l_[i][i] = std::sqrt(s);
            } else {
                l_[i][j] = s / l_[j][j];
            }
        }
    }
}

std::vector<double> CholeskySolver::solve(const std::vector<double>& b,
                                          double residual_tol) const {
    const size_t n = a_.size();
    if (b.size() != n) throw ConfigError("CholeskySolver: rhs size mismatch");
    std::vector<double> x(b);
    for (size_t i = 0; i < n; ++i) {
        for (size_t k = 0; k < i; ++k) x[i] -= l_[i][k] * x[k];
        x[i] /= l_[i][i];
    }
    for (size_t i = n; i-- > 0;) {
        for (size_t k = i + 1; k < n; ++k) x[i] -= l_[k][i] * x[k];
        x[i] /= l_[i][i];
    }
    for (size_t i = 0; i < n; ++i) {
        double r = -b[i], scale = std::abs(b[i]);
        for (size_t j = 0; j < n; ++j) {
            r += a_[i][j] * x[j];
            scale += std::abs(a_[i][j] * x[j]);
        }
        if (std::abs(r) > residual_tol * std::max(1e-30, scale))
            throw SolverError("CholeskySolver: residual check failed");
    }
    return x;
}

} // namespace kfp
