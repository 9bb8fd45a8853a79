#include "kfp/model.hpp"
#include "kfp/errors.hpp"
#include "kfp/quadrature.hpp"
#include "kfp/special.hpp"

#include <cmath>
#include <stdexcept>

namespace kfp {

ModelParams::ModelParams(double kappa_, double a_) : kappa(kappa_), a(a_) {
    if (!(kappa > 0.5)) throw std::domain_error("ModelParams: kappa must exceed 1/2");
    if (a < 0.0) throw std::domain_error("ModelParams: a must be >= 0");
    L = std::sqrt(2.0 * kappa);
}

double maxwellian(double v) {
    return std::exp(-0.5 * v * v) / std::sqrt(2.0 * M_PI);
}

double kappa_norm_const(double kappa) {
    if (!(kappa > 0.5)) throw std::domain_error("kappa_norm_const: kappa must exceed 1/2");
    return std::exp(log_gamma(kappa) - log_gamma(kappa - 0.5) -
                    0.5 * std::log(2.0 * M_PI * kappa));
}

double f_kappa(double v, const ModelParams& p) {
    const double c = kappa_norm_const(p.kappa);
    return c * std::exp(-p.kappa * std::log1p(v * v / (2.0 * p.kappa)));
}

double f_kappa_a(double v, const ModelParams& p) {
    return f_kappa(v, p) * std::exp(-0.5 * p.a * v * v);
}

double two_bump_init(double v, const ModelParams& p, double u) {
    return 0.5 * (f_kappa(v + u, p) + f_kappa(v - u, p));
}

double StationaryState::operator()(double v) const {
    return mass_factor * f_kappa_a(v, params);
}

StationaryState stationary_state(const ModelParams& p, double mass_in) {
    if (mass_in == 0.0) return {p, 0.0};
    const double eq_mass = (p.a == 0.0) ? 1.0 : reg_kappa_moment(0, p.kappa, p.a);
    return {p, mass_in / eq_mass};
}

double schrodinger_potential(double v, const ModelParams& p) {
    const double r = v * v / (2.0 * p.kappa);
    const double q = 1.0 / (1.0 + r);
    return 0.25 * v * v * (q + p.a) * (q + p.a) -
           0.5 * ((1.0 - r) * q * q + p.a);
}

double weighted_l2_error(const std::function<double(double)>& f,
                         const std::function<double(double)>& g,
                         const std::function<double(double)>& weight,
                         double rel_tol) {
    auto integrand = [&](double v) {
        double d = f(v) - g(v);
        if (d == 0.0) return 0.0;
        return d * d * weight(v);
    };
    QuadOptions opts;
    opts.rel_tol = rel_tol;
    opts.abs_tol = 1e-30;
    return std::sqrt(std::max(0.0, adaptive_quad(integrand, QuadDomain::whole_line, opts)));
}

VelocityGrid::VelocityGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 3) throw ConfigError("VelocityGrid: need at least 3 nodes");
    for (size_t j = 1; j < nodes_.size(); ++j)
        if (!(nodes_[j] > nodes_[j - 1]))
            throw ConfigError("VelocityGrid: nodes must increase strictly");
}

VelocityGrid VelocityGrid::uniform(double v_max, int n_cells) {
    if (n_cells < 2 || !(v_max > 0.0)) throw ConfigError("VelocityGrid: bad uniform grid parameters");
    std::vector<double> v(n_cells + 1);
    for (int j = 0; j <= n_cells; ++j)
        v[j] = -v_max + 2.0 * v_max * j / n_cells;
    v[n_cells] = v_max; // exact endpoints
    v[0] = -v_max;
    return VelocityGrid(std::move(v));
}

VelocityGrid VelocityGrid::stretched(double v_max, int n_cells, double ratio) {
    if (n_cells % 2 != 0) throw ConfigError("VelocityGrid: stretched mesh needs even cell count");
    if (!(ratio > 0.0)) throw ConfigError("VelocityGrid: stretch ratio must be positive");
    const int half = n_cells / 2;
    // widths w, w r, w r^2 ... from the center outward, scaled to cover [0, v_max]
    std::vector<double> w(half);
    double sum = 0.0, cur = 1.0;
    for (int i = 0; i < half; ++i, cur *= ratio) {
        w[i] = cur;
        sum += cur;
    }
    for (auto& wi : w) wi *= v_max / sum;
    std::vector<double> v(n_cells + 1);
    v[half] = 0.0;
    for (int i = 0; i < half; ++i) {
        v[half + 1 + i] = v[half + i] + w[i];
        v[half - 1 - i] = -(v[half + 1 + i]);
    }
    v[0] = -v_max;
    v[n_cells] = v_max;
    return VelocityGrid(std::move(v));
}

GridFunction::GridFunction(const VelocityGrid& g, std::vector<double> vals)
    : grid(&g), values(std::move(vals)) {
    if (int(values.size()) != g.n_interior())
        throw ConfigError("GridFunction: value count must match interior node count");
}

GridFunction GridFunction::sample(const VelocityGrid& g,
                                  const std::function<double(double)>& f) {
    std::vector<double> vals(g.n_interior());
    for (int j = 1; j <= g.n_interior(); ++j) vals[j - 1] = f(g.node(j));
    return GridFunction(g, std::move(vals));
}

double discrete_l2_error(const GridFunction& f_ref, const GridFunction& f_num) {
    if (!(*f_ref.grid == *f_num.grid))
        throw ConfigError("discrete_l2_error: grids differ");
    double s = 0.0;
    for (size_t j = 0; j < f_ref.values.size(); ++j) {
        double d = f_ref.values[j] - f_num.values[j];
        s += d * d;
    }
    const int n_nodes = f_ref.grid->n_cells() + 1;
    return std::sqrt(2.0 * f_ref.grid->v_max() / n_nodes * s);
}

double discrete_l2_error(double v_max, int n_nodes, const std::vector<double>& va,
                         const std::vector<double>& vb) {
    if (va.size() != vb.size())
        throw ConfigError("discrete_l2_error: length mismatch");
    double s = 0.0;
    for (size_t j = 0; j < va.size(); ++j) {
        double d = va[j] - vb[j];
        s += d * d;
    }
    return std::sqrt(2.0 * v_max / n_nodes * s);
}

} // namespace kfp
