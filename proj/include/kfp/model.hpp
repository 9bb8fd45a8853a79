#pragma once

#include <functional>
#include <vector>

namespace kfp {

/// Parameters of the energetic Fokker-Planck model. The map scale is tied to
/// the shape parameter, L = sqrt(2 kappa); the collision frequency is 1.
struct ModelParams {
    double kappa;
    double a;
    double L;
    double nu = 1.0;

    explicit ModelParams(double kappa_, double a_ = 0.0);
};

/// Standard Maxwellian, unit mass and temperature.
double maxwellian(double v);

/// Normalization constant c_kappa = Gamma(kappa) / (sqrt(2 pi kappa) Gamma(kappa-1/2)).
double kappa_norm_const(double kappa);

/// kappa-distribution c_kappa (1 + v^2/(2 kappa))^{-kappa}.
double f_kappa(double v, const ModelParams& p);

/// Regularized equilibrium f_kappa(v) e^{-a v^2/2}. Keeps the unregularized
/// constant c_kappa, so its mass is below 1 for a > 0.
double f_kappa_a(double v, const ModelParams& p);

/// Two-bump initial condition, the half-sum of kappa-distributions shifted by +-u.
double two_bump_init(double v, const ModelParams& p, double u = 2.0);

/// Long-time state n f_{kappa,a} with n = mass_in / <f_{kappa,a}>.
struct StationaryState {
    ModelParams params;
    double mass_factor; // n

    double operator()(double v) const;
};
StationaryState stationary_state(const ModelParams& p, double mass_in);

/// Potential of the Liouville-transformed (Schroedinger) eigenvalue problem;
/// confining for a > 0, decaying like kappa(kappa+1)/v^2 for a = 0.
double schrodinger_potential(double v, const ModelParams& p);

/// sqrt(int (f-g)^2 weight dv) by adaptive quadrature over the whole line.
double weighted_l2_error(const std::function<double(double)>& f,
                         const std::function<double(double)>& g,
                         const std::function<double(double)>& weight,
                         double rel_tol = 1e-9);

/// Truncated velocity mesh, nodes v_0..v_{N_v}; boundary values of grid
/// functions are implicitly zero (homogeneous Dirichlet).
class VelocityGrid {
public:
    static VelocityGrid uniform(double v_max, int n_cells);
    /// Symmetric mesh whose cell widths grow geometrically from the center.
    static VelocityGrid stretched(double v_max, int n_cells, double ratio);
    explicit VelocityGrid(std::vector<double> nodes);

    const std::vector<double>& nodes() const { return nodes_; }
    int n_cells() const { return int(nodes_.size()) - 1; }
    int n_interior() const { return int(nodes_.size()) - 2; }
    double v_max() const { return nodes_.back(); }
    double node(int j) const { return nodes_[j]; }
    double midpoint(int j) const { return 0.5 * (nodes_[j] + nodes_[j + 1]); }
    /// Cell length around interior node j: v_{j+1/2} - v_{j-1/2}.
    double cell_length(int j) const { return 0.5 * (nodes_[j + 1] - nodes_[j - 1]); }

    bool operator==(const VelocityGrid& o) const { return nodes_ == o.nodes_; }

private:
    std::vector<double> nodes_;
};

/// Nodal values at the interior nodes of a VelocityGrid.
struct GridFunction {
    const VelocityGrid* grid;
    std::vector<double> values;

    GridFunction(const VelocityGrid& g, std::vector<double> vals);
    static GridFunction sample(const VelocityGrid& g,
                               const std::function<double(double)>& f);
};

/// Discrete L2_v distance sqrt( (2 v_max / N) sum_j |a_j - b_j|^2 ) over the
/// interior nodes, N being the total node count of the common grid.
double discrete_l2_error(const GridFunction& f_ref, const GridFunction& f_num);

/// Same norm for plain value arrays living on a uniform grid with the given
/// half-width and total node count.
double discrete_l2_error(double v_max, int n_nodes, const std::vector<double>& va,
                         const std::vector<double>& vb);

} // namespace kfp
