#include "kfp/fd.hpp"
#include "kfp/errors.hpp"

#include <cmath>

namespace kfp {

std::vector<double> TridiagonalOperator::apply(const std::vector<double>& f) const {
    const size_t n = main.size();
    if (f.size() != n) throw ConfigError("TridiagonalOperator: size mismatch");
    std::vector<double> y(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        y[i] = main[i] * f[i];
        if (i > 0) y[i] += sub[i] * f[i - 1];
        if (i + 1 < n) y[i] += sup[i] * f[i + 1];
    }
    return y;
}

TridiagonalOperator fd_build(const VelocityGrid& grid, const ModelParams& p) {
    if (grid.n_cells() < 3) throw ConfigError("fd_build: grid needs at least 3 cells");
    auto eta = [&](double v) { return 1.0 / (1.0 + v * v / (2.0 * p.kappa)) + p.a; };
    const int n = grid.n_interior();
    TridiagonalOperator op{&grid, std::vector<double>(n, 0.0),
                           std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    for (int j = 1; j <= n; ++j) {
        const double vm = grid.midpoint(j - 1); // v_{j-1/2}
        const double vp = grid.midpoint(j);     // v_{j+1/2}
        const double dvj = grid.cell_length(j);
        if (!(dvj > 0.0)) throw ConfigError("fd_build: degenerate cell");
        const double hm = grid.node(j) - grid.node(j - 1);
        const double hp = grid.node(j + 1) - grid.node(j);
        const int i = j - 1;
        op.sub[i] = (-eta(vm) * vm / 2.0 + 1.0 / hm) / dvj;
        op.main[i] = ((eta(vp) * vp / 2.0 - 1.0 / hp) - (eta(vm) * vm / 2.0 + 1.0 / hm)) / dvj;
        op.sup[i] = (eta(vp) * vp / 2.0 + 1.0 / hp) / dvj;
    }
    return op;
}

FDStepper::FDStepper(const TridiagonalOperator& op, double dt)
    : grid_(op.grid), dt_(dt) {
    if (!(dt > 0.0)) throw ConfigError("FDStepper: dt must be positive");
    const size_t n = op.main.size();
    std::vector<double> sub(n), diag(n), sup(n);
    for (size_t i = 0; i < n; ++i) {
        sub[i] = -dt * op.sub[i];
        diag[i] = 1.0 - dt * op.main[i];
        sup[i] = -dt * op.sup[i];
    }
    solver_ = std::make_unique<TridiagonalSolver>(std::move(sub), std::move(diag),
                                                  std::move(sup));
}

GridFunction FDStepper::step(const GridFunction& f) const {
    if (f.grid != grid_ && !(*f.grid == *grid_))
        throw ConfigError("FDStepper: grid mismatch");
    return GridFunction(*f.grid, solver_->solve(f.values));
}

void FDStepper::step_in_place(std::vector<double>& values) const {
    values = solver_->solve(values);
}

double fd_mass(const GridFunction& f) {
    double m = 0.0;
    for (size_t i = 0; i < f.values.size(); ++i)
        m += f.grid->cell_length(int(i) + 1) * f.values[i];
    return m;
}

} // namespace kfp
