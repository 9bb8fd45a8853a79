#include "kfp/special.hpp"
#include "kfp/errors.hpp"
#include "kfp/quadrature.hpp"

#include <cmath>

namespace kfp {

double gamma_fn(double x) {
    if (!(x > 0.0))
        throw std::domain_error("gamma_fn: argument must be positive");
    if (x > 20.0) return std::exp(std::lgamma(x));
    return std::tgamma(x);
}

double log_gamma(double x) {
    if (!(x > 0.0))
        throw std::domain_error("log_gamma: argument must be positive");
    return std::lgamma(x);
}

double kappa_moment(int l, double kappa) {
    if (l < 0) throw std::domain_error("kappa_moment: l must be >= 0");
    if (!(l < 2.0 * kappa - 1.0))
        throw std::domain_error("kappa_moment: moment of order " + std::to_string(l) +
                                " diverges for kappa = " + std::to_string(kappa));
    const double lh = 0.5 * (l + 1);
    double lg = 0.5 * l * std::log(2.0 * kappa) + log_gamma(lh) +
                log_gamma(kappa - lh) - log_gamma(kappa - 0.5) -
                0.5 * std::log(M_PI);
    return std::exp(lg);
}

double reg_kappa_moment(int l, double kappa, double a) {
    if (!(a > 0.0))
        throw std::domain_error("reg_kappa_moment: requires a > 0; use kappa_moment for a = 0");
    if (l < 0) throw std::domain_error("reg_kappa_moment: l must be >= 0");
    const double lc = log_gamma(kappa) - log_gamma(kappa - 0.5) -
                      0.5 * std::log(2.0 * M_PI * kappa);
    auto integrand = [=](double v) {
        // log-domain product keeps v^l * f_{kappa,a} finite for any node
        double v2 = v * v;
        double le = lc - kappa * std::log1p(v2 / (2.0 * kappa)) - 0.5 * a * v2;
        if (l > 0) {
            if (v == 0.0) return 0.0;
            le += l * std::log(std::abs(v));
        }
        return std::exp(le);
    };
    QuadOptions opts;
    opts.rel_tol = 1e-11;
    // heavy integrands peak around v ~ sqrt(l/a); widen the map accordingly
    opts.map_scale = std::max(1.0, std::sqrt(l / (a + 1.0 / (2.0 * kappa + l + 1.0))) * 0.5);
    return 2.0 * adaptive_quad(integrand, QuadDomain::half_line, opts);
}

MomentTable MomentTable::build(double kappa, double a, int lmax) {
    if (a < 0.0) throw std::domain_error("MomentTable: a must be >= 0");
    MomentTable t{kappa, a, {}};
    for (int l = 0; l <= lmax; ++l) {
        if (a == 0.0) {
            if (!(l < 2.0 * kappa - 1.0)) break; // higher moments diverge
            t.values.push_back(kappa_moment(l, kappa));
        } else {
            t.values.push_back(reg_kappa_moment(l, kappa, a));
        }
    }
    return t;
}

} // namespace kfp
