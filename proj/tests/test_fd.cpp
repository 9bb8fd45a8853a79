#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kfp/errors.hpp"
#include "kfp/fd.hpp"
#include "kfp/model.hpp"

#include <cmath>

using namespace kfp;

namespace {

double eta(double v, const ModelParams& p) {
    return 1.0 / (1.0 + v * v / (2.0 * p.kappa)) + p.a;
}

} // namespace

TEST_CASE("assembled row entries on a uniform grid") {
    ModelParams p(3.0, 1e-3);
    auto g = VelocityGrid::uniform(15.0, 100);
    auto op = fd_build(g, p);
    const double dv = 0.3;
    for (int j : {1, 25, 50, 99}) {
        const double vm = g.midpoint(j - 1), vp = g.midpoint(j);
        CHECK(op.sup[j - 1] ==
              doctest::Approx((eta(vp, p) * vp / 2 + 1.0 / dv) / dv).epsilon(1e-13));
        CHECK(op.sub[j - 1] ==
              doctest::Approx((-eta(vm, p) * vm / 2 + 1.0 / dv) / dv).epsilon(1e-13));
        CHECK(op.main[j - 1] ==
              doctest::Approx(((eta(vp, p) * vp / 2 - 1.0 / dv) -
                               (eta(vm, p) * vm / 2 + 1.0 / dv)) /
                              dv).epsilon(1e-13));
    }
}

TEST_CASE("flux form telescopes: interior mass change is boundary flux only") {
    ModelParams p(3.0, 0.0);
    auto g = VelocityGrid::uniform(10.0, 50);
    auto op = fd_build(g, p);
    // compactly supported f away from the boundary: total flux sum vanishes
    auto f = GridFunction::sample(g, [](double v) {
        return std::abs(v) < 5.0 ? std::exp(-1.0 / (1.0 - v * v / 25.0)) : 0.0;
    });
    auto af = op.apply(f.values);
    double total = 0.0;
    for (int j = 1; j <= g.n_interior(); ++j) total += g.cell_length(j) * af[j - 1];
    // exact telescoping up to roundoff: boundary fluxes are zero here
    CHECK(std::abs(total) < 1e-14);
}

TEST_CASE("steady-state residual shrinks second order under refinement") {
    ModelParams p(3.0, 1e-3);
    auto res_norm = [&](int n_cells) {
        auto g = VelocityGrid::uniform(20.0, n_cells);
        auto op = fd_build(g, p);
        auto fe = GridFunction::sample(g, [&](double v) { return f_kappa_a(v, p); });
        auto r = op.apply(fe.values);
        double worst = 0.0;
        // interior region only: the boundary rows see the Dirichlet cutoff
        for (int j = g.n_interior() / 4; j < 3 * g.n_interior() / 4; ++j)
            worst = std::max(worst, std::abs(r[j]));
        return worst;
    };
    const double r1 = res_norm(250), r2 = res_norm(500);
    CHECK(r1 / r2 > 3.0);
    CHECK(r1 / r2 < 5.0);
}

TEST_CASE("implicit Euler: zero fixed point, consistency, near-steady drift") {
    ModelParams p(3.0, 0.0);
    auto g = VelocityGrid::uniform(30.0, 500);
    auto op = fd_build(g, p);
    FDStepper st(op, 0.01);

    GridFunction zero(g, std::vector<double>(g.n_interior(), 0.0));
    auto z1 = st.step(zero);
    for (double v : z1.values) CHECK(v == 0.0);

    auto f = GridFunction::sample(g, [&](double v) { return two_bump_init(v, p); });
    auto af = op.apply(f.values);
    for (double dt : {1e-3, 1e-4}) {
        FDStepper fine(op, dt);
        auto f1 = fine.step(f);
        double worst = 0.0;
        for (int j = 0; j < g.n_interior(); ++j)
            worst = std::max(worst,
                             std::abs((f1.values[j] - f.values[j]) / dt - af[j]));
        CHECK(worst < 2000.0 * dt); // ||A^2 f|| sized bound
    }
}

TEST_CASE("fine-grid stationary samples barely move, second order in dv") {
    ModelParams p(3.0, 0.0);
    auto drift = [&](int n_cells) {
        auto g = VelocityGrid::uniform(30.0, n_cells);
        auto op = fd_build(g, p);
        FDStepper st(op, 0.01);
        auto f = GridFunction::sample(g, [&](double v) { return f_kappa(v, p); });
        auto f0 = f.values;
        for (int s = 0; s < 100; ++s) st.step_in_place(f.values);
        double worst = 0.0;
        for (size_t j = 0; j < f0.size(); ++j)
            worst = std::max(worst, std::abs(f.values[j] - f0[j]));
        return worst; // change per unit time
    };
    const double d1 = drift(2000);
    CHECK(d1 < 2e-5);
    const double d2 = drift(4000);
    CHECK(d2 < d1 / 3.0);
}

TEST_CASE("mass: cell sums, sampling accuracy, Dirichlet leakage") {
    ModelParams p(3.0, 0.0);
    // constant vector: mass = c (2 vmax - one cell)
    auto g = VelocityGrid::uniform(10.0, 50);
    GridFunction c(g, std::vector<double>(g.n_interior(), 2.0));
    CHECK(fd_mass(c) == doctest::Approx(2.0 * (20.0 - 0.4)).epsilon(1e-13));

    // two-bump samples on the paper grid: mass 1 within 2e-4
    auto g2 = VelocityGrid::uniform(30.0, 1000);
    auto f = GridFunction::sample(g2, [&](double v) { return two_bump_init(v, p); });
    CHECK(std::abs(fd_mass(f) - 1.0) < 2e-4);

    // truncation at vmax=15 leaks mass over time
    auto g3 = VelocityGrid::uniform(15.0, 500);
    auto f3 = GridFunction::sample(g3, [&](double v) { return two_bump_init(v, p); });
    auto op3 = fd_build(g3, p);
    FDStepper st3(op3, 0.01);
    const double m0 = fd_mass(f3);
    for (int s = 0; s < 1000; ++s) st3.step_in_place(f3.values);
    const double m1 = fd_mass(f3);
    CHECK(m1 < m0);
    CHECK(m0 - m1 > 1e-5);
}

TEST_CASE("non-uniform stretched mesh works end to end") {
    ModelParams p(3.0, 0.0);
    auto g = VelocityGrid::stretched(30.0, 400, 1.01);
    auto op = fd_build(g, p);
    FDStepper st(op, 0.01);
    auto f = GridFunction::sample(g, [&](double v) { return two_bump_init(v, p); });
    const double m0 = fd_mass(f);
    for (int s = 0; s < 100; ++s) st.step_in_place(f.values);
    CHECK(std::abs(fd_mass(f) - m0) < 1e-5);
    for (double v : f.values) CHECK(std::isfinite(v));
}

TEST_CASE("guards") {
    ModelParams p(3.0, 0.0);
    CHECK_THROWS_AS(fd_build(VelocityGrid({0.0, 1.0, 2.0}), p), ConfigError);
    auto g = VelocityGrid::uniform(10.0, 50);
    auto op = fd_build(g, p);
    CHECK_THROWS_AS(FDStepper(op, 0.0), ConfigError);
    FDStepper st(op, 0.01);
    auto g2 = VelocityGrid::uniform(10.0, 40);
    GridFunction other(g2, std::vector<double>(g2.n_interior(), 0.0));
    CHECK_THROWS_AS(st.step(other), ConfigError);
}
