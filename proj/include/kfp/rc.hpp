#pragma once

#include "kfp/linalg.hpp"
#include "kfp/model.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace kfp {

/// Rational Chebyshev polynomial C_n^L(v) = cos(n arccot(v/L)) = T_n(v/sqrt(L^2+v^2)).
double rc_cheb_C(int n, double v, double L);

/// Companion sine family S_n^L(v) = sin((n+1) arccot(v/L)).
double rc_cheb_S(int n, double v, double L);

/// Scaled basis function Theta_n = C_n^L Upsilon_kappa, orthogonal in L^2_{f_kappa^{-1}}.
/// Requires odd integer kappa (checked by rc_basis_check).
double rc_theta(int n, double v, const ModelParams& p);

/// Derivative of Theta_n from the three-term formula.
double rc_theta_deriv(int n, double v, const ModelParams& p);

/// <Theta_n> = int Theta_n dv, via the angular substitution.
double rc_theta_mean(int n, const ModelParams& p, int panels = 2048);

/// Validates the RC scheme restrictions: odd integer kappa >= 3, a = 0.
void rc_basis_check(const ModelParams& p);

/// Expansion coefficients of -L_kappa(Theta_n) over Theta_{n-4}..Theta_{n+4}.
struct RCOperatorCoeffs {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0, e = 0.0;
};
RCOperatorCoeffs rc_operator_coeffs(int n, int kappa);

/// Penta-diagonal generator matrix M of the coefficient ODE X' = M X;
/// block index k corresponds to the even mode 2k.
struct PentaMatrix {
    int n = 0;                            // dimension (Ntilde + 1)
    std::vector<std::vector<double>> diag; // diag[o + 2] holds offset o in [-2, 2]

    double at(int i, int j) const;
    std::vector<double> apply(const std::vector<double>& x) const;
};
PentaMatrix rc_build_matrix(int n_modes, const ModelParams& p);

/// Even-mode spectral coefficients a_0, a_2, ..., a_{2 Ntilde} and time.
struct RCState {
    std::vector<double> coeffs;
    double t = 0.0;
};

/// Projection of an even initial condition; quadrature runs in the angular
/// variable s = arccot(v/L) with a composite panel rule.
RCState rc_project(const std::function<double(double)>& f_in, int n_modes,
                   const ModelParams& p, int panels = 2048);

/// Time stepper for X' = M X: implicit Euler by default, Crank-Nicolson
/// behind a flag. Banded LU factored once per (matrix, dt).
class RCStepper {
public:
    RCStepper(const PentaMatrix& m, double dt, bool crank_nicolson = false);
    RCState step(const RCState& s) const;
    double dt() const { return dt_; }

private:
    PentaMatrix m_;
    double dt_;
    bool cn_;
    std::unique_ptr<BandedLU> lu_;
};

double rc_reconstruct(const RCState& s, double v, const ModelParams& p);

/// <f> from the coefficients; closed form for kappa = 3, cached basis means otherwise.
double rc_mass(const RCState& s, const ModelParams& p);

} // namespace kfp
