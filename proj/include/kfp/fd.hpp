#pragma once

#include "kfp/linalg.hpp"
#include "kfp/model.hpp"

#include <memory>
#include <vector>

namespace kfp {

/// Finite-volume discretization of the drift-diffusion flux on the interior
/// nodes, with homogeneous Dirichlet values at the boundary nodes.
struct TridiagonalOperator {
    const VelocityGrid* grid;
    std::vector<double> sub, main, sup; // rows j = 1..N_v-1, index 0 based

    std::vector<double> apply(const std::vector<double>& f) const;
};

/// Assembles the tridiagonal operator with eta(v) = 1/(1+v^2/(2 kappa)) + a
/// and midpoint flux averaging.
TridiagonalOperator fd_build(const VelocityGrid& grid, const ModelParams& p);

/// Implicit Euler stepper (I - dt A) f^{n+1} = f^n; the tridiagonal system is
/// factored once per (operator, dt).
class FDStepper {
public:
    FDStepper(const TridiagonalOperator& op, double dt);
    GridFunction step(const GridFunction& f) const;
    void step_in_place(std::vector<double>& values) const;
    double dt() const { return dt_; }

private:
    const VelocityGrid* grid_;
    double dt_;
    std::unique_ptr<TridiagonalSolver> solver_;
};

/// Cell-sum mass over interior nodes.
double fd_mass(const GridFunction& f);

} // namespace kfp
