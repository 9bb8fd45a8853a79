#pragma once

#include "kfp/linalg.hpp"
#include "kfp/model.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace kfp {

/// Recursion data of the non-classical orthogonal polynomials for the weight
/// f_{kappa,a}: three-term coefficients beta_k, squared norms gamma_k, and the
/// mixed-moment table sigma_{k,l} against the Hermite-like reference basis.
struct GSBasisTables {
    ModelParams params;
    int n_max;                              // largest usable polynomial index
    std::vector<double> beta;               // beta[k], k = 1..n_max (beta[0] unused)
    std::vector<double> gamma;              // gamma[k], k = 0..n_max
    std::vector<std::vector<double>> sigma; // sigma[k][l], trapezoidal extent

    GSBasisTables(const ModelParams& p) : params(p), n_max(0) {}
};

/// Recursion coefficient and squared norm of the reference (Maxwellian-cutoff)
/// monic basis: b_k = k/(1+a), ||q_k||^2 = k!/(1+a)^{(2k+1)/2}.
struct GSReferenceCoeffs {
    double b;
    double q_norm2;
};
GSReferenceCoeffs gs_reference_coeffs(int k, double a);

/// Modified moments sigma_{0,l} = int q_l f_{kappa,a} dv for l = 0..l_max.
/// Computed both from the monomial expansion of q_l combined with the moment
/// table and by direct quadrature; a disagreement beyond 1e-8 (relative to the
/// attainable Cauchy-Schwarz scale) aborts the construction.
std::vector<double> gs_modified_moments(int l_max, const ModelParams& p);

/// Modified Chebyshev algorithm: fills sigma, beta_k and gamma_k up to index n.
/// A non-positive sigma_{k,k} raises RecurrenceBreakdown with the usable size.
GSBasisTables gs_modified_chebyshev(int n, const ModelParams& p);

/// Monic polynomial p_k(v) from the three-term recurrence.
double gs_eval_p(int k, double v, const GSBasisTables& t);
/// p_0..p_k and derivatives in one recurrence pass.
void gs_eval_all(int k, double v, const GSBasisTables& t, std::vector<double>& p,
                 std::vector<double>* dp = nullptr);

/// Intermediate tables of the stiffness construction, exposed for diagnostics:
/// theta_{k,l} = (p_k', p_l'), chi_{k,l} = (p_k, p_l'), xi_{k,l} = (p_k', p_l),
/// all weighted by f_{kappa,a}. chi vanishes for k > l-1, xi for l > k-1, and
/// chi is the transpose of xi; xi also carries the derivative expansion
/// p_l' = sum_{k<l} (xi_{l,k}/gamma_k) p_k.
struct GSStiffnessParts {
    std::vector<std::vector<double>> theta, chi, xi;
};

/// Galerkin stiffness matrix theta_{k,l} = int p_k' p_l' f_{kappa,a} dv for
/// k,l <= n, filled by the mixed-moment recurrences; requires tables built by
/// gs_build (the recurrences consume indices up to ~2n).
std::vector<std::vector<double>> gs_stiffness(int n, const GSBasisTables& t,
                                              const ModelParams& p,
                                              GSStiffnessParts* parts = nullptr);

/// Tables sized so that an order-n scheme (including its stiffness matrix)
/// can be assembled.
GSBasisTables gs_build(int n, const ModelParams& p);

/// Spectral coefficients of h = f / f_{kappa,a} in the p_k basis.
struct GSState {
    std::vector<double> coeffs;
    double t = 0.0;
};

/// alpha_l(0) = (1/gamma_l) int f_in p_l dv (weight-free integral).
GSState gs_project(const std::function<double(double)>& f_in, int n,
                   const GSBasisTables& t);

/// Implicit Euler stepper for diag(gamma) alpha' = -theta alpha; the SPD
/// system (diag(gamma) + dt theta) is factored once.
class GSStepper {
public:
    GSStepper(const std::vector<std::vector<double>>& theta,
              const GSBasisTables& t, double dt);
    GSState step(const GSState& s) const;
    double dt() const { return dt_; }

private:
    std::vector<double> gamma_;
    double dt_;
    std::unique_ptr<CholeskySolver> chol_;
};

double gs_reconstruct(const GSState& s, double v, const GSBasisTables& t,
                      const ModelParams& p);

/// <f> = alpha_0 gamma_0.
double gs_mass(const GSState& s, const GSBasisTables& t);

} // namespace kfp
