#pragma once

#include <functional>
#include <vector>

namespace kfp {

/// Hermite eigenfunction psi_k of the Maxwellian Fokker-Planck operator,
/// psi_0 = M, psi_1 = v M, sqrt(k+1) psi_{k+1} = v psi_k - sqrt(k) psi_{k-1}.
double hermite_fn(int k, double v);

/// Evaluate psi_0..psi_n at once (cheaper than n calls).
std::vector<double> hermite_all(int n, double v);

/// Spectral coefficients in L^2_{M^{-1}} and the current time.
struct HermiteState {
    std::vector<double> coeffs;
    double t = 0.0;
};

/// alpha_k(0) = int f_in psi_k M^{-1} dv for k = 0..N. Throws AccuracyError
/// when f_in has heavier-than-Maxwellian tails and the integrals diverge.
HermiteState hermite_project(const std::function<double(double)>& f_in, int n);

/// Closed-form evolution alpha_k(t0 + t) = e^{-k t} alpha_k(t0); exact in time.
HermiteState hermite_evolve(const HermiteState& s, double t);

double hermite_reconstruct(const HermiteState& s, double v);

/// <f> = alpha_0.
double hermite_mass(const HermiteState& s);

} // namespace kfp
