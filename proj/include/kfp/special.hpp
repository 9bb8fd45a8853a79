#pragma once

#include <vector>

namespace kfp {

/// Gamma function on the positive half line.
double gamma_fn(double x);

/// log Gamma(x), x > 0. Used for ratios of large arguments.
double log_gamma(double x);

/// Moment int |v|^l f_kappa dv of the kappa-distribution,
///   (1/sqrt(pi)) (2 kappa)^{l/2} G((l+1)/2) G(kappa-(l+1)/2) / G(kappa-1/2),
/// finite only for l < 2 kappa - 1. Evaluated in the log domain.
double kappa_moment(int l, double kappa);

/// Moment int |v|^l f_{kappa,a} dv of the regularized distribution, a > 0;
/// finite for every l. Computed by adaptive quadrature to ~1e-10 relative.
double reg_kappa_moment(int l, double kappa, double a);

/// Moments m_0..m_lmax of the weight f_{kappa,a} (a = 0 entries stop at the
/// last convergent order).
struct MomentTable {
    double kappa;
    double a;
    std::vector<double> values;

    static MomentTable build(double kappa, double a, int lmax);
};

} // namespace kfp
