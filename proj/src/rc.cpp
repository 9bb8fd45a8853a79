// Rational Chebyshev spectral scheme for the unregularized energetic
// Fokker-Planck equation. The solution is expanded in the even scaled basis
// Theta_{2n} = C_{2n}^L Upsilon_kappa with L = sqrt(2 kappa); the operator is
// exactly penta-diagonal in that basis.

#include "kfp/rc.hpp"
#include "kfp/errors.hpp"
#include "kfp/quadrature.hpp"
#include "kfp/special.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace kfp {

namespace {

bool odd_integer_kappa(const ModelParams& p) {
    const double r = std::round(p.kappa);
    return std::abs(p.kappa - r) < 1e-12 && int(r) % 2 == 1;
}

/// Prefactor of Upsilon_kappa: (c_kappa / sqrt(2 kappa))^{1/2}.
double upsilon_prefactor(const ModelParams& p) {
    return std::sqrt(kappa_norm_const(p.kappa) / p.L);
}

double upsilon(double v, const ModelParams& p) {
    return upsilon_prefactor(p) *
           std::exp(-0.5 * (p.kappa + 1.0) * std::log1p(v * v / (2.0 * p.kappa)));
}

} // namespace

void rc_basis_check(const ModelParams& p) {
    if (!odd_integer_kappa(p) || p.kappa < 3.0)
        throw ConfigError("RC scheme requires an odd integer kappa >= 3; "
                          "use the GS scheme for other kappa");
    if (p.a != 0.0)
        throw ConfigError("RC scheme solves the unregularized equation (a = 0); "
                          "use the GS scheme for a > 0");
}

double rc_cheb_C(int n, double v, double L) {
    const double s = std::atan2(L, v); // arccot(v/L) in (0, pi)
    return std::cos(n * s);
}

double rc_cheb_S(int n, double v, double L) {
    const double s = std::atan2(L, v);
    return std::sin((n + 1) * s);
}

double rc_theta(int n, double v, const ModelParams& p) {
    return rc_cheb_C(n, v, p.L) * upsilon(v, p);
}

double rc_theta_deriv(int n, double v, const ModelParams& p) {
    const double r = 1.0 + v * v / (2.0 * p.kappa);
    double d = -0.5 * (p.kappa + 1.0) / p.kappa * v / r * rc_theta(n, v, p);
    if (n > 0)
        d += 0.5 * n / (p.L * std::sqrt(r)) *
             (rc_theta(n - 1, v, p) - rc_theta(n + 1, v, p));
    return d;
}

double rc_theta_mean(int n, const ModelParams& p, int panels) {
    // substitution v = L cot s turns the integral into
    // pref * L * int_0^pi cos(n s) sin^{kappa-1}(s) ds
    const double pref = upsilon_prefactor(p) * p.L;
    auto g = [&](double s) {
        return std::cos(n * s) * std::pow(std::sin(s), p.kappa - 1.0);
    };
    return pref * composite_gl5(g, 0.0, M_PI, panels);
}

RCOperatorCoeffs rc_operator_coeffs(int n, int kappa) {
    if (n < 0 || n % 2 != 0)
        throw std::domain_error("rc_operator_coeffs: mode index must be even and >= 0");
    const double k = kappa;
    RCOperatorCoeffs c;
    if (n == 0) {
        c.c = -(k - 1) * (k - 1) / (16 * k);
        c.d = -(k - 1) / (4 * k);
        c.e = (k - 1) * (k + 3) / (16 * k);
    } else if (n == 2) {
        c.b = -(k - 1) / (8 * k);
        c.c = -(25 + k * (k - 6)) / (32 * k);
        c.d = -(k - 9) / (8 * k);
        c.e = (k - 3) * (k + 5) / (32 * k);
    } else {
        c.a = (k - 1 + n) * (k + 3 - n) / (32 * k);
        c.b = -(k - (n - 1) * (n - 1)) / (8 * k);
        c.c = (-3.0 * n * n - (k - 1) * (k - 1)) / (16 * k);
        c.d = -(k - (n + 1) * (n + 1)) / (8 * k);
        c.e = (k - 1 - n) * (k + 3 + n) / (32 * k);
    }
    return c;
}

double PentaMatrix::at(int i, int j) const {
    if (i < 0 || j < 0 || i >= n || j >= n || std::abs(i - j) > 2) return 0.0;
    return diag[j - i + 2][std::min(i, j)];
}

std::vector<double> PentaMatrix::apply(const std::vector<double>& x) const {
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j)
            y[i] += at(i, j) * x[j];
    return y;
}

PentaMatrix rc_build_matrix(int n_modes, const ModelParams& p) {
    rc_basis_check(p);
    const int k = int(std::round(p.kappa));
    PentaMatrix m;
    m.n = n_modes;
    m.diag.assign(5, std::vector<double>(n_modes, 0.0));
    // column j carries the expansion of -L_kappa(Theta_{2j}): c on the
    // diagonal, d/e below, b/a above
    for (int j = 0; j < n_modes; ++j) {
        const auto c = rc_operator_coeffs(2 * j, k);
        m.diag[2][j] = c.c;
        if (j >= 1) m.diag[3][j - 1] = c.b;  // row j-1
        if (j >= 2) m.diag[4][j - 2] = c.a;  // row j-2
        if (j + 1 < n_modes) m.diag[1][j] = c.d; // row j+1
        if (j + 2 < n_modes) m.diag[0][j] = c.e; // row j+2
    }
    return m;
}

RCState rc_project(const std::function<double(double)>& f_in, int n_modes,
                   const ModelParams& p, int panels) {
    rc_basis_check(p);
    // a_{2l} c_l = int f_in Theta_{2l} f_kappa^{-1} dv; in s = arccot(v/L) the
    // integrand becomes pref * L * f_in(L cot s) (1+v^2/2k)^{(kappa+1)/2} with
    // the (kappa+1)/2 power absorbed by sin^{-(kappa+1)}(s). Products are
    // formed only when f_in is nonzero to dodge 0 * inf at the endpoints.
    const double pref = p.L / std::sqrt(kappa_norm_const(p.kappa) * p.L);
    RCState s;
    s.coeffs.assign(n_modes, 0.0);
    for (int l = 0; l < n_modes; ++l) {
        auto g = [&](double ang) {
            const double v = p.L / std::tan(ang);
            const double f = f_in(v);
            if (f == 0.0) return 0.0;
            const double grow = std::exp(0.5 * (p.kappa + 1.0) *
                                         std::log1p(v * v / (2.0 * p.kappa)));
            return f * grow * std::cos(2.0 * l * ang);
        };
        const double cl = (l == 0) ? M_PI : M_PI / 2.0;
        s.coeffs[l] = pref * composite_gl5(g, 0.0, M_PI, panels) / cl;
    }
    return s;
}

RCStepper::RCStepper(const PentaMatrix& m, double dt, bool crank_nicolson)
    : m_(m), dt_(dt), cn_(crank_nicolson) {
    if (!(dt > 0.0)) throw ConfigError("RCStepper: dt must be positive");
    lu_ = std::make_unique<BandedLU>(m.n, 2);
    const double w = cn_ ? 0.5 * dt_ : dt_;
    for (int i = 0; i < m_.n; ++i)
        for (int j = std::max(0, i - 2); j <= std::min(m_.n - 1, i + 2); ++j)
            lu_->at(i, j) = (i == j ? 1.0 : 0.0) - w * m_.at(i, j);
    lu_->factor();
}

RCState RCStepper::step(const RCState& s) const {
    if (int(s.coeffs.size()) != m_.n) throw ConfigError("RCStepper: state size mismatch");
    std::vector<double> rhs = s.coeffs;
    if (cn_) {
        const auto mx = m_.apply(s.coeffs);
        for (int i = 0; i < m_.n; ++i) rhs[i] += 0.5 * dt_ * mx[i];
    }
    RCState out;
    out.coeffs = lu_->solve(rhs);
    out.t = s.t + dt_;
    return out;
}

double rc_reconstruct(const RCState& s, double v, const ModelParams& p) {
    // single pass over the C recurrence in the angular variable
    const double ang = std::atan2(p.L, v);
    const double ups = upsilon(v, p);
    double f = 0.0;
    for (size_t l = 0; l < s.coeffs.size(); ++l)
        f += s.coeffs[l] * std::cos(2.0 * l * ang);
    return f * ups;
}

double rc_mass(const RCState& s, const ModelParams& p) {
    if (std::abs(p.kappa - 3.0) < 1e-12) {
        const double amp = std::sqrt(kappa_norm_const(p.kappa) * p.L);
        const double a2 = s.coeffs.size() > 1 ? s.coeffs[1] : 0.0;
        return amp * M_PI / 2.0 * (s.coeffs[0] - 0.5 * a2);
    }
    // basis means depend only on (kappa, mode); computed once and cached
    static std::mutex mu;
    static std::map<std::pair<double, int>, double> cache;
    double m = 0.0;
    for (size_t l = 0; l < s.coeffs.size(); ++l) {
        double mean;
        {
            std::lock_guard<std::mutex> lock(mu);
            auto it = cache.find({p.kappa, int(l)});
            if (it != cache.end()) {
                mean = it->second;
            } else {
                mean = rc_theta_mean(2 * int(l), p);
                cache[{p.kappa, int(l)}] = mean;
            }
        }
        m += s.coeffs[l] * mean;
    }
    return m;
}

} // namespace kfp
