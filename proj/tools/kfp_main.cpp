// Command-line driver: run a scheme, build the reference, or execute one of
// the parameter studies (convergence, reconstruction, decay, coefficient
// trace). All file outputs are CSV with '#' comment headers plus a key=value
// manifest; studies also emit gnuplot data/command pairs.

#include "kfp/errors.hpp"
#include "kfp/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>

using namespace kfp;

namespace {

struct CommonOpts {
    std::string scheme = "fd";
    RunConfig cfg;
    std::string ref_cache;
    std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_scheme = true) {
    if (with_scheme)
        cmd->add_option("--scheme", o.scheme, "fd, fd-ref, rc, gs or hermite");
    cmd->add_option("--kappa", o.cfg.kappa, "shape parameter kappa");
    cmd->add_option("--a", o.cfg.a, "regularization cutoff a");
    cmd->add_option("--u", o.cfg.u, "bump shift of the initial condition");
    cmd->add_option("--N", o.cfg.n, "spectral truncation");
    cmd->add_option("--Nv", o.cfg.n_v, "velocity cells (FD)");
    cmd->add_option("--vmax", o.cfg.v_max, "domain half width (FD)");
    cmd->add_option("--dt", o.cfg.dt, "time step");
    cmd->add_option("--T", o.cfg.t_end, "final time");
    cmd->add_flag("--crank-nicolson", o.cfg.crank_nicolson,
                  "second-order stepping for the RC scheme");
    cmd->add_option("--t-out", o.cfg.output_times, "output times");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--ref-cache", o.ref_cache, "reference cache directory");
}

std::string default_ref_cache(const CommonOpts& o) {
    // one shared cache per working directory, so the reference is built once
    // and reused across runs and studies
    return o.ref_cache.empty() ? "refs" : o.ref_cache;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"kfp: spectral and finite-volume solvers for the 1D energetic "
                 "Fokker-Planck equation"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "",
                   "key=value config file; one [section] per subcommand");

    CommonOpts run_o;
    auto* cmd_run = app.add_subcommand("run", "run one scheme and report E_m/E_f");
    add_common(cmd_run, run_o);

    CommonOpts conv_o;
    std::vector<double> dt_list = {0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625};
    double t_star = 0.2;
    auto* cmd_conv = app.add_subcommand("converge", "E_f(t*) as a function of dt");
    add_common(cmd_conv, conv_o);
    cmd_conv->add_option("--dt-list", dt_list, "descending dt values");
    cmd_conv->add_option("--t-star", t_star, "comparison time");

    CommonOpts rec_o;
    std::vector<int> n_list = {8, 10, 16};
    auto* cmd_rec = app.add_subcommand("reconstruct", "initial-condition reconstruction error vs N");
    add_common(cmd_rec, rec_o);
    cmd_rec->add_option("--N-list", n_list, "truncations to test");

    CommonOpts dec_o;
    double fit_t0 = 30.0, fit_t1 = 45.0;
    auto* cmd_dec = app.add_subcommand("decay", "distance to the stationary state over time");
    add_common(cmd_dec, dec_o);
    cmd_dec->add_option("--fit-from", fit_t0, "fit window start");
    cmd_dec->add_option("--fit-to", fit_t1, "fit window end");

    CommonOpts tr_o;
    auto* cmd_tr = app.add_subcommand("trace", "spectral coefficient trajectories");
    add_common(cmd_tr, tr_o);

    CommonOpts mr_o;
    auto* cmd_mr = app.add_subcommand("make-ref", "build and cache the reference solution");
    add_common(cmd_mr, mr_o, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            run_o.cfg.scheme = scheme_from_string(run_o.scheme);
            run_o.cfg.out_dir = run_o.out;
            auto res = run(run_o.cfg, default_ref_cache(run_o));
            std::printf("# t_star        E_m            E_f            wall[s]\n");
            for (const auto& r : res.reports)
                std::printf("%-8g  %13.6e  %13.6e  %10.4f\n", r.t_star, r.e_m, r.e_f,
                            r.wall_time);
        } else if (cmd_conv->parsed()) {
            conv_o.cfg.scheme = scheme_from_string(conv_o.scheme);
            auto res = convergence_study(conv_o.cfg, dt_list, t_star, default_ref_cache(conv_o));
            std::printf("# dt            E_f(t*=%g)\n", t_star);
            std::vector<std::vector<double>> rows;
            for (const auto& r : res.rows) {
                std::printf("%-12g  %13.6e\n", r.dt, r.e_f);
                rows.push_back({r.dt, r.e_f});
            }
            std::printf("fitted slope (pre-saturation, %d pts): %.3f\n",
                        res.pre_saturation_count, res.fitted_slope);
            std::printf("saturation floor: %.6e\n", res.saturation_floor);
            if (!conv_o.out.empty()) {
                std::filesystem::create_directories(conv_o.out);
                write_csv(conv_o.out + "/convergence.csv",
                          {"kfp converge", "slope = " + std::to_string(res.fitted_slope)},
                          "dt,E_f", rows);
                write_gnuplot_pair(conv_o.out + "/convergence", "error vs time step", "dt",
                                   "E_f", true, true, {"dt", "E_f"}, rows);
            }
        } else if (cmd_rec->parsed()) {
            rec_o.cfg.scheme = scheme_from_string(rec_o.scheme);
            auto rows = reconstruction_study(rec_o.cfg, n_list);
            std::printf("# N     ||f_recon - f_in||_L2v\n");
            std::vector<std::vector<double>> out_rows;
            for (const auto& r : rows) {
                std::printf("%-5d  %13.6e\n", r.n, r.error);
                out_rows.push_back({double(r.n), r.error});
            }
            if (!rec_o.out.empty()) {
                std::filesystem::create_directories(rec_o.out);
                write_csv(rec_o.out + "/reconstruction.csv", {"kfp reconstruct"}, "N,error",
                          out_rows);
                write_gnuplot_pair(rec_o.out + "/reconstruction", "reconstruction error", "N",
                                   "error", false, true, {"N", "error"}, out_rows);
            }
        } else if (cmd_dec->parsed()) {
            dec_o.cfg.scheme = scheme_from_string(dec_o.scheme);
            auto res = decay_study(dec_o.cfg, fit_t0, fit_t1);
            std::printf("decay samples: %zu, saturation onset t = %g\n", res.times.size(),
                        res.saturation_time);
            std::printf("log-log slope over [%g, %g]: %.3f (squared-error curve: %.3f)\n",
                        fit_t0, fit_t1, res.loglog_slope, res.loglog_slope_squared);
            std::printf("log-linear rate: %.4f (R^2 = %.5f)\n", res.exp_rate, res.exp_r2);
            if (!dec_o.out.empty()) {
                std::filesystem::create_directories(dec_o.out);
                std::vector<std::vector<double>> rows;
                for (size_t i = 0; i < res.times.size(); ++i)
                    rows.push_back({res.times[i], res.errors[i]});
                write_csv(dec_o.out + "/decay.csv",
                          {"kfp decay", "loglog_slope = " + std::to_string(res.loglog_slope),
                           "exp_rate = " + std::to_string(res.exp_rate)},
                          "t,error", rows);
                write_gnuplot_pair(dec_o.out + "/decay", "relaxation to equilibrium", "t",
                                   "||f - f_inf||", true, true, {"t", "error"}, rows);
            }
        } else if (cmd_tr->parsed()) {
            tr_o.cfg.scheme = scheme_from_string(tr_o.scheme);
            auto res = coefficient_trace(tr_o.cfg);
            std::printf("final coefficients at T = %g:\n", tr_o.cfg.t_end);
            for (size_t k = 0; k < res.final_coeffs.size(); ++k)
                std::printf("  c[%zu] = %+.6e\n", k, res.final_coeffs[k]);
            std::printf("settled (t = %g):\n", res.settled_time);
            for (size_t k = 0; k < res.settled_coeffs.size(); ++k)
                std::printf("  c[%zu] = %+.6e\n", k, res.settled_coeffs[k]);
            if (!tr_o.out.empty()) {
                std::filesystem::create_directories(tr_o.out);
                std::vector<std::vector<double>> rows;
                std::string header = "t";
                for (size_t k = 0; k < res.final_coeffs.size(); ++k)
                    header += ",c" + std::to_string(k);
                for (size_t i = 0; i < res.times.size(); ++i) {
                    std::vector<double> row = {res.times[i]};
                    row.insert(row.end(), res.coeffs[i].begin(), res.coeffs[i].end());
                    rows.push_back(row);
                }
                write_csv(tr_o.out + "/trace.csv", {"kfp trace"}, header, rows);
                std::vector<std::string> cols = {"t"};
                for (size_t k = 0; k < res.final_coeffs.size(); ++k)
                    cols.push_back("c" + std::to_string(k));
                write_gnuplot_pair(tr_o.out + "/trace", "coefficient trajectories", "t",
                                   "coefficient", false, false, cols, rows);
            }
        } else if (cmd_mr->parsed()) {
            ReferenceConfig rcfg;
            rcfg.kappa = mr_o.cfg.kappa;
            rcfg.u = mr_o.cfg.u;
            rcfg.times = mr_o.cfg.output_times;
            auto ref = make_reference(rcfg, default_ref_cache(mr_o));
            std::printf("reference ready: kappa=%g, %zu nodes, %zu snapshot(s), hash %s\n",
                        rcfg.kappa, ref.nodes.size(), ref.values.size(),
                        rcfg.content_hash().c_str());
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
