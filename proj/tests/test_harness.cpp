#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kfp/errors.hpp"
#include "kfp/harness.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace kfp;
namespace fs = std::filesystem;

namespace {

const std::string kWork = "test_harness_out";

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Small reference configuration shared by the cases below (kappa = 3,
/// snapshots at 0.2 and 2).
RunConfig small_run(Scheme s) {
    RunConfig c;
    c.scheme = s;
    c.kappa = 3.0;
    c.a = (s == Scheme::gs) ? 1e-3 : 0.0;
    c.dt = 0.01;
    c.t_end = 2.0;
    c.output_times = {0.2, 2.0};
    return c;
}

} // namespace

TEST_CASE("config validation produces actionable errors") {
    RunConfig c = small_run(Scheme::rc);
    c.kappa = 4.0; // even: outside the RC parity restriction
    CHECK_THROWS_WITH_AS(c.validate(),
                         doctest::Contains("use the GS scheme"), ConfigError);
    c = small_run(Scheme::rc);
    c.n = 7;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_run(Scheme::gs);
    c.a = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_run(Scheme::fd);
    c.output_times = {0.123456};
    CHECK_THROWS_AS(c.validate(), ConfigError); // not a multiple of dt
    CHECK_NOTHROW(small_run(Scheme::fd).validate());
    CHECK(scheme_from_string("fd-ref") == Scheme::fd_ref);
    CHECK_THROWS_AS(scheme_from_string("spectral"), ConfigError);
}

TEST_CASE("reference build is cached and reloaded identically") {
    fs::remove_all(kWork);
    ReferenceConfig rcfg;
    rcfg.kappa = 3.0;
    rcfg.times = {0.2, 2.0};
    rcfg.t_end = 2.0;
    auto ref1 = make_reference(rcfg, kWork + "/refs");
    CHECK(ref1.nodes.size() == 9999);
    CHECK(ref1.values.size() == 2);
    const std::string path = kWork + "/refs/fdref_" + rcfg.content_hash() + ".csv";
    CHECK(fs::exists(path));
    const auto stamp = fs::last_write_time(path);
    auto ref2 = make_reference(rcfg, kWork + "/refs"); // loads, does not rebuild
    CHECK(fs::last_write_time(path) == stamp);
    CHECK(ref1.nodes == ref2.nodes);
    CHECK(ref1.values == ref2.values);
    // masses stay near 1 on the huge domain
    double m = 0.0;
    const double dv = 2000.0 / 10000;
    for (double f : ref2.values[1]) m += dv * f;
    CHECK(m == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("fd run reports sane errors and emits files") {
    RunConfig c = small_run(Scheme::fd);
    c.n_v = 500;
    c.v_max = 30.0;
    c.out_dir = kWork + "/fd_run";
    auto res = run(c, kWork + "/refs");
    REQUIRE(res.reports.size() == 2);
    for (const auto& r : res.reports) {
        CHECK(r.e_f > 0.0);
        CHECK(r.e_f < 5e-3);
        CHECK(r.e_m < 1e-3);
        CHECK(r.wall_time >= 0.0);
    }
    CHECK(fs::exists(c.out_dir + "/errors.csv"));
    CHECK(fs::exists(c.out_dir + "/snapshot_t0.2.csv"));
    CHECK(fs::exists(c.out_dir + "/manifest.txt"));
    const std::string manifest = slurp(c.out_dir + "/manifest.txt");
    CHECK(manifest.find("scheme = fd") != std::string::npos);
    CHECK(manifest.find("config_hash = ") != std::string::npos);
}

TEST_CASE("reruns are bit-identical apart from wall times") {
    RunConfig c = small_run(Scheme::rc);
    c.n = 8;
    c.out_dir = kWork + "/rc_run1";
    run(c, kWork + "/refs");
    c.out_dir = kWork + "/rc_run2";
    run(c, kWork + "/refs");
    auto strip_wall = [](const std::string& text) {
        std::istringstream in(text);
        std::ostringstream out;
        for (std::string line; std::getline(in, line);) {
            // last CSV column is wall_time; manifests carry wall_total lines
            if (line.rfind("wall_total", 0) == 0) continue;
            auto last = line.rfind(',');
            if (last != std::string::npos && line.find_first_not_of("0123456789.,-+e #") ==
                                                 std::string::npos)
                line = line.substr(0, last);
            out << line << "\n";
        }
        return out.str();
    };
    CHECK(strip_wall(slurp(kWork + "/rc_run1/errors.csv")) ==
          strip_wall(slurp(kWork + "/rc_run2/errors.csv")));
    CHECK(slurp(kWork + "/rc_run1/snapshot_t2.csv") ==
          slurp(kWork + "/rc_run2/snapshot_t2.csv"));
}

TEST_CASE("rc and gs runs against the small reference") {
    RunConfig rc = small_run(Scheme::rc);
    rc.n = 8;
    auto rres = run(rc, kWork + "/refs");
    CHECK(rres.reports[0].e_m < 1e-10);
    CHECK(rres.reports[0].e_f > 5e-3); // truncation-limited at N=8
    CHECK(rres.reports[0].e_f < 7e-2);
    CHECK(rres.reports[1].e_f < rres.reports[0].e_f);

    RunConfig gs = small_run(Scheme::gs);
    gs.kappa = 31.0;
    gs.n = 10;
    auto gres = run(gs, kWork + "/refs");
    CHECK(gres.reports[0].e_m < 1e-11);
    CHECK(gres.reports[1].e_f < 5e-3);
}

TEST_CASE("hermite run is exact up to quadrature") {
    RunConfig c = small_run(Scheme::hermite);
    c.n = 8;
    c.output_times = {0.2, 1.0, 2.0};
    auto res = run(c, kWork + "/refs");
    for (const auto& r : res.reports) {
        CHECK(r.e_f < 1e-8);
        CHECK(r.e_m < 1e-9);
    }
}

TEST_CASE("convergence study fits a first-order slope") {
    RunConfig c = small_run(Scheme::gs);
    c.kappa = 31.0;
    c.n = 10;
    auto res = convergence_study(c, {0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625}, 2.0,
                                 kWork + "/refs");
    REQUIRE(res.rows.size() == 6);
    for (size_t i = 1; i < res.rows.size(); ++i) CHECK(res.rows[i].e_f < res.rows[i - 1].e_f);
    CHECK(res.pre_saturation_count >= 3);
    CHECK(res.fitted_slope > 0.7);
    CHECK(res.fitted_slope < 1.3);
    // the reference's own defect bounds the floor near 1.2e-3
    CHECK(res.saturation_floor > 1.2e-3 / 2.0);
    CHECK(res.saturation_floor < 1.2e-3 * 2.0);
    // halving dt halves the error within 20 percent in the fitted range
    for (size_t i = 1; i < res.rows.size(); ++i) {
        if (res.rows[i - 1].e_f < 3.0 * res.saturation_floor) continue;
        const double ratio = res.rows[i - 1].e_f / res.rows[i].e_f;
        if (res.rows[i].e_f >= 3.0 * res.saturation_floor) {
            CHECK(ratio > 1.6);
            CHECK(ratio < 2.4);
        }
    }
}

TEST_CASE("reconstruction study is monotone on the documented truncations") {
    RunConfig rc = small_run(Scheme::rc);
    auto rows = reconstruction_study(rc, {8, 10, 16});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].error > rows[1].error);
    CHECK(rows[1].error > rows[2].error);
    // values land in the paper's windows
    CHECK(rows[0].error == doctest::Approx(5.4e-2).epsilon(0.25));
    CHECK(rows[2].error == doctest::Approx(1.6e-3).epsilon(0.5));

    RunConfig gs = small_run(Scheme::gs);
    gs.kappa = 31.0;
    auto grows = reconstruction_study(gs, {6, 8, 10, 12, 16});
    for (size_t i = 1; i < grows.size(); ++i) CHECK(grows[i].error < grows[i - 1].error);
    CHECK(grows[3].error == doctest::Approx(2.6e-3).epsilon(0.5));
}

TEST_CASE("decay study: gs relaxes exponentially") {
    RunConfig c = small_run(Scheme::gs);
    c.kappa = 31.0;
    c.n = 10;
    c.dt = 0.01;
    c.t_end = 12.0;
    auto res = decay_study(c, 1.0, 10.0);
    CHECK(res.exp_rate > 0.5);
    CHECK(res.exp_r2 > 0.99);
    CHECK(res.errors.front() > res.errors.back());
}

TEST_CASE("coefficient trace settles to the documented structure") {
    RunConfig c = small_run(Scheme::gs);
    c.kappa = 31.0;
    c.n = 6;
    c.t_end = 2.0;
    auto res = coefficient_trace(c);
    REQUIRE(res.final_coeffs.size() == 7);
    CHECK(res.settled_coeffs[0] == doctest::Approx(1.0005252712609581).epsilon(1e-6));
    for (size_t k = 1; k < res.settled_coeffs.size(); ++k)
        CHECK(std::abs(res.settled_coeffs[k]) < 1e-9);
    // magnitudes decrease with index at t = 2 for the smooth state
    const auto& last = res.final_coeffs;
    CHECK(std::abs(last[4]) < std::abs(last[0]));
}

TEST_CASE("gnuplot pair emission") {
    fs::create_directories(kWork);
    write_gnuplot_pair(kWork + "/demo", "demo", "x", "y", true, true, {"x", "y"},
                       {{1.0, 2.0}, {2.0, 4.0}});
    CHECK(fs::exists(kWork + "/demo.dat"));
    const std::string gp = slurp(kWork + "/demo.gp");
    CHECK(gp.find("logscale") != std::string::npos);
    CHECK(gp.find("plot") != std::string::npos);
}

TEST_CASE("parallel_for_each covers all tasks deterministically") {
    std::vector<int> hits(257, 0);
    parallel_for_each(257, [&](int i) { hits[i] += i; }, 8);
    for (int i = 0; i < 257; ++i) CHECK(hits[i] == i);
}

TEST_CASE("fnv1a hash is stable") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("kfp") != fnv1a_hex("kfq"));
}
