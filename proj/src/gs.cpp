// Gram-Schmidt spectral scheme for the regularized energetic Fokker-Planck
// equation. The orthogonal polynomials of the weight f_{kappa,a} are built by
// the modified Chebyshev algorithm against a Hermite-like reference basis, and
// the Galerkin stiffness matrix follows from the theta/chi/xi recurrences.
// The moment step is the numerically delicate part: both computation paths
// (monomial expansion + moment table, direct quadrature) are kept and
// cross-checked before anything downstream is trusted.

#include "kfp/gs.hpp"
#include "kfp/errors.hpp"
#include "kfp/quadrature.hpp"
#include "kfp/special.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace kfp {

namespace {

/// Attainable magnitude of sigma_{0,l} by Cauchy-Schwarz:
/// |(q_l, 1)_omega| <= ||q_l||_mu-ish * sqrt(m_0). Used to scale comparisons
/// so that near-Maxwellian weights (sigma -> 0) do not trip false alarms.
double sigma_scale(int l, double a, double m0) {
    const double lq = log_gamma(l + 1.0) - 0.5 * (2 * l + 1) * std::log1p(a);
    return std::exp(0.5 * (lq + std::log(m0)));
}

} // namespace

GSReferenceCoeffs gs_reference_coeffs(int k, double a) {
    if (k < 1) throw std::domain_error("gs_reference_coeffs: k must be >= 1");
    if (a < 0.0) throw std::domain_error("gs_reference_coeffs: a must be >= 0");
    GSReferenceCoeffs c;
    c.b = double(k) / (1.0 + a);
    c.q_norm2 = std::exp(log_gamma(k + 1.0) - 0.5 * (2 * k + 1) * std::log1p(a));
    return c;
}

std::vector<double> gs_modified_moments(int l_max, const ModelParams& p) {
    if (!(p.a > 0.0))
        throw ConfigError("gs_modified_moments: GS construction requires a > 0");

    // moments of the weight (odd orders vanish by symmetry)
    std::vector<double> m(l_max + 1, 0.0);
    for (int l = 0; l <= l_max; l += 2) {
        try {
            m[l] = reg_kappa_moment(l, p.kappa, p.a);
        } catch (const AccuracyError& e) {
            char ctx[160];
            std::snprintf(ctx, sizeof ctx,
                          "gs_modified_moments: weight moment of order %d not computable "
                          "in double precision (kappa=%g, a=%g); reduce N or increase a",
                          l, p.kappa, p.a);
            throw AccuracyError(ctx, e.achieved_error, e.requested_error);
        }
    }

    // monomial coefficients of the reference polynomials q_l
    std::vector<std::vector<double>> q(l_max + 1);
    q[0] = {1.0};
    if (l_max >= 1) q[1] = {0.0, 1.0};
    for (int l = 1; l < l_max; ++l) {
        const double b = double(l) / (1.0 + p.a);
        std::vector<double> next(l + 2, 0.0);
        for (int i = 0; i <= l; ++i) next[i + 1] += q[l][i];
        for (int i = 0; i < l; ++i) next[i] -= b * q[l - 1][i];
        q[l + 1] = std::move(next);
    }

    std::vector<double> sigma(l_max + 1, 0.0);
    for (int l = 0; l <= l_max; ++l) {
        if (l % 2 == 1) continue; // odd integrand

        // path 1: linear combination of the moments (long double accumulation)
        long double s = 0.0L;
        for (int i = 0; i <= l; i += 2)
            if (q[l][i] != 0.0) s += (long double)q[l][i] * (long double)m[i];
        const double s_mono = double(s);

        // path 2: direct quadrature of q_l * omega
        const double c_kap = kappa_norm_const(p.kappa);
        const double scale = sigma_scale(l, p.a, m[0]);
        auto integrand = [&, l](double v) {
            const double om = c_kap *
                              std::exp(-p.kappa * std::log1p(v * v / (2.0 * p.kappa)) -
                                       0.5 * p.a * v * v);
            if (om == 0.0) return 0.0;
            double q0 = 1.0, q1 = v, ql = (l == 0) ? 1.0 : v;
            for (int j = 1; j < l; ++j) {
                const double q2 = v * q1 - double(j) / (1.0 + p.a) * q0;
                q0 = q1;
                q1 = q2;
                ql = q2;
            }
            // a polynomial overflow against a denormal weight means the true
            // product already vanished (the finite moments bound it)
            const double prod = ql * om;
            return std::isfinite(prod) ? prod : 0.0;
        };
        QuadOptions opts;
        opts.rel_tol = 1e-11;
        opts.abs_tol = 1e-13 * scale;
        opts.map_scale = std::max(1.0, 0.5 * std::sqrt(l / (p.a + 0.05)));
        const double s_quad = 2.0 * adaptive_quad(integrand, QuadDomain::half_line, opts);

        if (!std::isfinite(s_mono) || !std::isfinite(s_quad))
            throw ConfigError("gs_modified_moments: moment combination overflowed; "
                              "reduce N or increase a");
        const double mismatch = std::abs(s_mono - s_quad);
        if (mismatch > 1e-8 * std::max(std::abs(s_quad), scale))
            throw AccuracyError("gs_modified_moments: monomial and quadrature paths disagree at l=" +
                                    std::to_string(l),
                                mismatch / std::max(std::abs(s_quad), scale), 1e-8);
        sigma[l] = s_mono;
    }
    return sigma;
}

GSBasisTables gs_modified_chebyshev(int n, const ModelParams& p) {
    if (n < 1) throw ConfigError("gs_modified_chebyshev: n must be >= 1");
    const int l_max = 2 * n + 1;
    GSBasisTables t(p);
    t.sigma.assign(n + 1, {});
    t.sigma[0] = gs_modified_moments(l_max, p);
    t.beta.assign(n + 1, 0.0);
    t.gamma.assign(n + 1, 0.0);
    t.gamma[0] = t.sigma[0][0];
    if (!(t.gamma[0] > 0.0))
        throw RecurrenceBreakdown("gs_modified_chebyshev: nonpositive weight mass", 0, -1);

    for (int k = 1; k <= n; ++k) {
        const int top = l_max - k;
        t.sigma[k].assign(top + 1, 0.0);
        for (int l = k; l <= top; ++l) {
            double s = t.sigma[k - 1][l + 1];
            if (k >= 2) s -= t.beta[k - 1] * t.sigma[k - 2][l];
            if (l >= 1) s += double(l) / (1.0 + p.a) * t.sigma[k - 1][l - 1];
            t.sigma[k][l] = s;
        }
        const double diag = t.sigma[k][k];
        if (!(diag > 0.0) || !std::isfinite(diag))
            throw RecurrenceBreakdown("gs_modified_chebyshev: sigma_kk lost positivity", k, k - 1);
        t.beta[k] = diag / t.sigma[k - 1][k - 1];
        t.gamma[k] = diag;
        t.n_max = k;
    }
    return t;
}

double gs_eval_p(int k, double v, const GSBasisTables& t) {
    if (k > t.n_max && k > 1)
        throw ConfigError("gs_eval_p: index beyond constructed tables");
    double p0 = 1.0, p1 = v;
    if (k == 0) return p0;
    for (int j = 1; j < k; ++j) {
        const double p2 = v * p1 - t.beta[j] * p0;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

void gs_eval_all(int k, double v, const GSBasisTables& t, std::vector<double>& p,
                 std::vector<double>* dp) {
    if (k > t.n_max && k > 1)
        throw ConfigError("gs_eval_all: index beyond constructed tables");
    p.assign(k + 1, 0.0);
    p[0] = 1.0;
    if (k >= 1) p[1] = v;
    if (dp) {
        dp->assign(k + 1, 0.0);
        if (k >= 1) (*dp)[1] = 1.0;
    }
    for (int j = 1; j < k; ++j) {
        p[j + 1] = v * p[j] - t.beta[j] * p[j - 1];
        if (dp) (*dp)[j + 1] = p[j] + v * (*dp)[j] - t.beta[j] * (*dp)[j - 1];
    }
}

std::vector<std::vector<double>> gs_stiffness(int n, const GSBasisTables& t,
                                              const ModelParams& p,
                                              GSStiffnessParts* parts) {
    // the recurrences reach ahead: row k consumes column indices up to
    // (2n - 1) - (k - 1), so the basis tables must extend accordingly
    const int l_top = 2 * n + 1;
    if (t.n_max < 2 * n)
        throw ConfigError("gs_stiffness: tables too short; build them with gs_build(n)");

    // starting row theta_{1,l} = chi_{0,l} = int p_l' omega dv by quadrature
    // in the compactified variable (odd l only; parity kills the rest)
    const double c_kap = kappa_norm_const(p.kappa);
    std::vector<double> th1(l_top + 1, 0.0);
    for (int l = 1; l <= l_top; l += 2) {
        auto integrand = [&, l](double v) {
            const double om = c_kap *
                              std::exp(-p.kappa * std::log1p(v * v / (2.0 * p.kappa)) -
                                       0.5 * p.a * v * v);
            if (om == 0.0) return 0.0;
            std::vector<double> pv, dv;
            gs_eval_all(l, v, t, pv, &dv);
            const double prod = dv[l] * om;
            return std::isfinite(prod) ? prod : 0.0;
        };
        QuadOptions opts;
        opts.rel_tol = 1e-11;
        opts.abs_tol = 1e-13 * sigma_scale(l, p.a, t.gamma[0]);
        opts.map_scale = std::max(1.0, 0.5 * std::sqrt(l / (p.a + 0.05)));
        th1[l] = 2.0 * adaptive_quad(integrand, QuadDomain::half_line, opts);
    }

    // rectangular work tables; only the trapezoid row k, l <= l_top - k is
    // ever written, reads outside it hit defined zeros
    auto make = [&](int rows) {
        std::vector<std::vector<double>> m(rows);
        for (int k = 0; k < rows; ++k) m[k].assign(l_top + 2, 0.0);
        return m;
    };
    auto theta = make(n + 1);
    auto chi = make(n + 1);  // chi[k][l], chi_{-1,l} = 0 implicit
    auto xi = make(n + 2);
    std::copy(th1.begin(), th1.end(), theta[1].begin());
    std::copy(th1.begin(), th1.end(), chi[0].begin());
    xi[1][0] = t.gamma[0]; // int p_l omega = gamma_0 delta_{0l}

    auto bet = [&](int l) { return (l >= 1 && l <= t.n_max) ? t.beta[l] : 0.0; };
    auto gam = [&](int l) { return (l >= 0 && l <= t.n_max) ? t.gamma[l] : 0.0; };

    for (int k = 1; k <= n; ++k) {
        const int top = l_top - k;
        if (k >= 1 && k + 1 <= n + 1) {
            for (int l = 0; l <= top; ++l) {
                // xi_{k+1,l} = xi_{k,l+1} + beta_l xi_{k,l-1} + gamma_l d_{kl} - beta_k xi_{k-1,l}
                double u = (l + 1 < int(xi[k].size())) ? xi[k][l + 1] : 0.0;
                if (l >= 1) u += bet(l) * xi[k][l - 1];
                if (k == l) u += gam(l);
                u -= bet(k) * xi[k - 1][l];
                xi[k + 1][l] = u;
            }
        }
        if (k <= n) {
            for (int l = 0; l <= top; ++l) {
                // chi_{k,l} = chi_{k-1,l+1} + beta_l chi_{k-1,l-1} - gamma_l d_{k-1,l} - beta_{k-1} chi_{k-2,l}
                double u = (l + 1 < int(chi[k - 1].size())) ? chi[k - 1][l + 1] : 0.0;
                if (l >= 1) u += bet(l) * chi[k - 1][l - 1];
                if (k - 1 == l) u -= gam(l);
                if (k >= 2) u -= bet(k - 1) * chi[k - 2][l];
                chi[k][l] = u;
            }
        }
        if (k >= 2) {
            for (int l = 0; l <= top; ++l) {
                // theta_{k,l} = theta_{k-1,l+1} + beta_l theta_{k-1,l-1} + chi_{k-1,l}
                //               - beta_{k-1} theta_{k-2,l} - xi_{k-1,l}
                double u = (l + 1 < int(theta[k - 1].size())) ? theta[k - 1][l + 1] : 0.0;
                if (l >= 1) u += bet(l) * theta[k - 1][l - 1];
                u += chi[k - 1][l];
                u -= bet(k - 1) * theta[k - 2][l];
                u -= xi[k - 1][l];
                theta[k][l] = u;
            }
        }
    }

    if (parts) {
        parts->theta = theta;
        parts->chi = chi;
        parts->xi = xi;
    }

    // assemble the symmetric (n+1)^2 block; validate symmetry, then enforce it
    std::vector<std::vector<double>> out(n + 1, std::vector<double>(n + 1, 0.0));
    double scale = 0.0;
    for (int k = 0; k <= n; ++k)
        for (int l = 0; l <= n; ++l) scale = std::max(scale, std::abs(theta[k][l]));
    for (int k = 0; k <= n; ++k)
        for (int l = 0; l <= n; ++l) {
            if (std::abs(theta[k][l] - theta[l][k]) > 1e-7 * scale)
                throw AccuracyError("gs_stiffness: recurrence lost symmetry",
                                    std::abs(theta[k][l] - theta[l][k]) / scale, 1e-7);
            out[k][l] = (k == 0 || l == 0) ? 0.0 : 0.5 * (theta[k][l] + theta[l][k]);
        }
    return out;
}

GSBasisTables gs_build(int n, const ModelParams& p) {
    return gs_modified_chebyshev(2 * n + 2, p);
}

GSState gs_project(const std::function<double(double)>& f_in, int n,
                   const GSBasisTables& t) {
    if (n > t.n_max) throw ConfigError("gs_project: N beyond constructed tables");
    GSState s;
    s.coeffs.assign(n + 1, 0.0);
    for (int l = 0; l <= n; ++l) {
        auto integrand = [&, l](double v) {
            const double f = f_in(v);
            if (f == 0.0) return 0.0;
            const double prod = f * gs_eval_p(l, v, t);
            return std::isfinite(prod) ? prod : 0.0;
        };
        QuadOptions opts;
        opts.rel_tol = 1e-12;
        opts.abs_tol = 1e-13 * std::sqrt(std::max(t.gamma[l], 1.0));
        s.coeffs[l] = adaptive_quad(integrand, QuadDomain::whole_line, opts) / t.gamma[l];
    }
    return s;
}

GSStepper::GSStepper(const std::vector<std::vector<double>>& theta,
                     const GSBasisTables& t, double dt)
    : dt_(dt) {
    if (!(dt > 0.0)) throw ConfigError("GSStepper: dt must be positive");
    const int n = int(theta.size());
    if (n - 1 > t.n_max) throw ConfigError("GSStepper: stiffness larger than tables");
    gamma_.assign(t.gamma.begin(), t.gamma.begin() + n);
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a[i][j] = (i == j ? gamma_[i] : 0.0) + dt * theta[i][j];
    chol_ = std::make_unique<CholeskySolver>(std::move(a));
}

GSState GSStepper::step(const GSState& s) const {
    if (s.coeffs.size() != gamma_.size()) throw ConfigError("GSStepper: state size mismatch");
    std::vector<double> rhs(s.coeffs.size());
    for (size_t i = 0; i < rhs.size(); ++i) rhs[i] = gamma_[i] * s.coeffs[i];
    GSState out;
    out.coeffs = chol_->solve(rhs);
    // theta's first row/column vanish identically, so the alpha_0 block is
    // exactly decoupled: gamma_0 alpha_0^{n+1} = gamma_0 alpha_0^n
    out.coeffs[0] = s.coeffs[0];
    out.t = s.t + dt_;
    return out;
}

double gs_reconstruct(const GSState& s, double v, const GSBasisTables& t,
                      const ModelParams& p) {
    const double w = f_kappa_a(v, p);
    if (w == 0.0) return 0.0;
    std::vector<double> pv;
    gs_eval_all(int(s.coeffs.size()) - 1, v, t, pv);
    double h = 0.0;
    for (size_t l = 0; l < s.coeffs.size(); ++l) h += s.coeffs[l] * pv[l];
    return h * w;
}

double gs_mass(const GSState& s, const GSBasisTables& t) {
    return s.coeffs.empty() ? 0.0 : s.coeffs[0] * t.gamma[0];
}

} // namespace kfp
