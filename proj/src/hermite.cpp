#include "kfp/hermite.hpp"
#include "kfp/errors.hpp"
#include "kfp/model.hpp"
#include "kfp/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace kfp {

std::vector<double> hermite_all(int n, double v) {
    if (n < 0) throw std::domain_error("hermite_all: n must be >= 0");
    std::vector<double> psi(n + 1, 0.0);
    if (std::abs(v) > 40.0) return psi; // below double underflow anyway
    psi[0] = maxwellian(v);
    if (n >= 1) psi[1] = v * psi[0];
    for (int k = 1; k < n; ++k)
        psi[k + 1] = (v * psi[k] - std::sqrt(double(k)) * psi[k - 1]) / std::sqrt(double(k + 1));
    return psi;
}

double hermite_fn(int k, double v) { return hermite_all(k, v).back(); }

HermiteState hermite_project(const std::function<double(double)>& f_in, int n) {
    HermiteState s;
    s.coeffs.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
        auto integrand = [&, k](double v) {
            double f = f_in(v);
            if (f == 0.0) return 0.0;
            // psi_k M^{-1} is the normalized probabilists' Hermite polynomial;
            // evaluate it directly so the Gaussian never underflows the product
            double h0 = 1.0, h1 = v;
            double hk = (k == 0) ? h0 : h1;
            for (int j = 1; j < k; ++j) {
                double h2 = (v * h1 - std::sqrt(double(j)) * h0) / std::sqrt(double(j + 1));
                h0 = h1;
                h1 = h2;
                hk = h2;
            }
            return f * hk;
        };
        QuadOptions opts;
        opts.rel_tol = 1e-11;
        opts.abs_tol = 1e-14;
        s.coeffs[k] = adaptive_quad(integrand, QuadDomain::whole_line, opts);
    }
    return s;
}

HermiteState hermite_evolve(const HermiteState& s, double t) {
    if (t < 0.0) throw std::domain_error("hermite_evolve: t must be >= 0");
    HermiteState out = s;
    out.t = s.t + t;
    for (size_t k = 1; k < out.coeffs.size(); ++k)
        out.coeffs[k] *= std::exp(-double(k) * t);
    return out;
}

double hermite_reconstruct(const HermiteState& s, double v) {
    const auto psi = hermite_all(int(s.coeffs.size()) - 1, v);
    double f = 0.0;
    for (size_t k = 0; k < s.coeffs.size(); ++k) f += s.coeffs[k] * psi[k];
    return f;
}

double hermite_mass(const HermiteState& s) { return s.coeffs.empty() ? 0.0 : s.coeffs[0]; }

} // namespace kfp
