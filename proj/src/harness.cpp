// Orchestration: scheme execution against the cached finite-volume reference,
// parameter studies and file emission (CSV + manifest + gnuplot pairs).

#include "kfp/harness.hpp"
#include "kfp/errors.hpp"
#include "kfp/fd.hpp"
#include "kfp/gs.hpp"
#include "kfp/hermite.hpp"
#include "kfp/quadrature.hpp"
#include "kfp/rc.hpp"
#include "kfp/special.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace kfp {

namespace fs = std::filesystem;

std::string version_string() { return "kfp 1.0.0"; }

Scheme scheme_from_string(const std::string& s) {
    if (s == "fd") return Scheme::fd;
    if (s == "fd-ref") return Scheme::fd_ref;
    if (s == "rc") return Scheme::rc;
    if (s == "gs") return Scheme::gs;
    if (s == "hermite") return Scheme::hermite;
    throw ConfigError("unknown scheme '" + s + "' (expected fd, fd-ref, rc, gs, hermite)");
}

std::string scheme_to_string(Scheme s) {
    switch (s) {
        case Scheme::fd: return "fd";
        case Scheme::fd_ref: return "fd-ref";
        case Scheme::rc: return "rc";
        case Scheme::gs: return "gs";
        case Scheme::hermite: return "hermite";
    }
    return "?";
}

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_label(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const auto t0 = clock::now();
    return std::chrono::duration<double>(clock::now() - t0).count();
}

int step_index(double t, double dt) {
    const double k = t / dt;
    const double r = std::round(k);
    if (std::abs(k - r) > 1e-6 * std::max(1.0, std::abs(k)))
        throw ConfigError("output time " + std::to_string(t) +
                          " is not a multiple of dt = " + std::to_string(dt));
    return int(r);
}

} // namespace

void RunConfig::validate() const {
    if (scheme != Scheme::hermite) { // the Hermite oracle ignores kappa and a
        ModelParams p(kappa, a);     // throws on bad kappa / a
        if (scheme == Scheme::rc) rc_basis_check(p);
        if (scheme == Scheme::gs && !(a > 0.0))
            throw ConfigError("GS scheme requires a > 0 (regularized equation)");
    }
    if (!(dt > 0.0) || !(t_end > 0.0)) throw ConfigError("dt and T must be positive");
    if (scheme == Scheme::rc && n % 2 != 0)
        throw ConfigError("RC truncation N must be even");
    for (double t : output_times) {
        if (t < 0.0 || t > t_end + 1e-12)
            throw ConfigError("output times must lie in [0, T]");
        step_index(t, dt);
    }
}

std::string RunConfig::echo() const {
    std::ostringstream os;
    os << "scheme = " << scheme_to_string(scheme) << "\n"
       << "kappa = " << fmt(kappa) << "\n"
       << "a = " << fmt(a) << "\n"
       << "u = " << fmt(u) << "\n"
       << "N = " << n << "\n"
       << "N_v = " << n_v << "\n"
       << "v_max = " << fmt(v_max) << "\n"
       << "dt = " << fmt(dt) << "\n"
       << "T = " << fmt(t_end) << "\n"
       << "crank_nicolson = " << (crank_nicolson ? 1 : 0) << "\n";
    os << "output_times =";
    for (double t : output_times) os << " " << fmt(t);
    os << "\n";
    return os.str();
}

std::string ReferenceConfig::echo() const {
    std::ostringstream os;
    os << "kappa = " << fmt(kappa) << "\nu = " << fmt(u) << "\nv_max = " << fmt(v_max)
       << "\nN_v = " << n_v << "\ndt = " << fmt(dt) << "\nT = " << fmt(t_end) << "\ntimes =";
    for (double t : times) os << " " << fmt(t);
    os << "\n";
    return os.str();
}

std::string fnv1a_hex(const std::string& s) {
    unsigned long long h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", h);
    return buf;
}

std::string ReferenceConfig::content_hash() const { return fnv1a_hex(echo()); }

const std::vector<double>& ReferenceSolution::at_time(double t) const {
    for (size_t i = 0; i < config.times.size(); ++i)
        if (std::abs(config.times[i] - t) < 1e-9) return values[i];
    throw ConfigError("reference solution has no snapshot at t = " + std::to_string(t));
}

namespace {

void save_reference(const ReferenceSolution& ref, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "# kfp fd reference solution\n";
    std::istringstream cfg(ref.config.echo());
    for (std::string line; std::getline(cfg, line);) out << "# " << line << "\n";
    out << "v";
    for (double t : ref.config.times) out << ",f_t" << fmt_label(t);
    out << "\n";
    for (size_t j = 0; j < ref.nodes.size(); ++j) {
        out << fmt(ref.nodes[j]);
        for (size_t i = 0; i < ref.values.size(); ++i) out << "," << fmt(ref.values[i][j]);
        out << "\n";
    }
}

std::optional<ReferenceSolution> load_reference(const ReferenceConfig& cfg,
                                                const std::string& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    ReferenceSolution ref;
    ref.config = cfg;
    ref.values.assign(cfg.times.size(), {});
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'v') continue;
        std::istringstream ls(line);
        std::string cell;
        if (!std::getline(ls, cell, ',')) continue;
        ref.nodes.push_back(std::stod(cell));
        for (size_t i = 0; i < cfg.times.size(); ++i) {
            if (!std::getline(ls, cell, ',')) return std::nullopt;
            ref.values[i].push_back(std::stod(cell));
        }
    }
    if (ref.nodes.size() != size_t(cfg.n_v) - 1) return std::nullopt;
    return ref;
}

} // namespace

ReferenceSolution make_reference(const ReferenceConfig& cfg, const std::string& cache_dir) {
    fs::create_directories(cache_dir);
    const std::string path = cache_dir + "/fdref_" + cfg.content_hash() + ".csv";
    if (auto cached = load_reference(cfg, path)) return *cached;

    ModelParams p(cfg.kappa, 0.0);
    VelocityGrid grid = VelocityGrid::uniform(cfg.v_max, cfg.n_v);
    auto f = GridFunction::sample(grid, [&](double v) { return two_bump_init(v, p, cfg.u); });
    auto op = fd_build(grid, p);
    FDStepper stepper(op, cfg.dt);

    ReferenceSolution ref;
    ref.config = cfg;
    ref.nodes.assign(grid.nodes().begin() + 1, grid.nodes().end() - 1);
    ref.values.assign(cfg.times.size(), {});

    std::vector<int> capture(cfg.times.size());
    int n_steps = step_index(cfg.t_end, cfg.dt);
    for (size_t i = 0; i < cfg.times.size(); ++i) {
        capture[i] = step_index(cfg.times[i], cfg.dt);
        n_steps = std::max(n_steps, capture[i]);
    }
    for (size_t i = 0; i < cfg.times.size(); ++i)
        if (capture[i] == 0) ref.values[i] = f.values;
    for (int s = 1; s <= n_steps; ++s) {
        stepper.step_in_place(f.values);
        for (size_t i = 0; i < cfg.times.size(); ++i)
            if (capture[i] == s) ref.values[i] = f.values;
    }
    save_reference(ref, path);
    return ref;
}

namespace {

/// Linear interpolation of an FD solution onto arbitrary points; zero outside
/// the truncated domain (Dirichlet).
std::vector<double> interp_to(const VelocityGrid& grid, const std::vector<double>& vals,
                              const std::vector<double>& pts) {
    std::vector<double> out(pts.size(), 0.0);
    const auto& nodes = grid.nodes();
    for (size_t i = 0; i < pts.size(); ++i) {
        const double v = pts[i];
        if (v <= nodes.front() || v >= nodes.back()) continue;
        auto it = std::upper_bound(nodes.begin(), nodes.end(), v);
        const int hi = int(it - nodes.begin());
        const int lo = hi - 1;
        const double w = (v - nodes[lo]) / (nodes[hi] - nodes[lo]);
        auto value_at = [&](int node_idx) {
            if (node_idx <= 0 || node_idx >= int(nodes.size()) - 1) return 0.0;
            return vals[node_idx - 1];
        };
        out[i] = (1.0 - w) * value_at(lo) + w * value_at(hi);
    }
    return out;
}

struct SchemeRun {
    // snapshot values on the reference nodes, one entry per output time
    std::vector<std::vector<double>> snapshots;
    std::vector<double> masses;
    std::vector<double> walls;
};

SchemeRun run_fd(const RunConfig& c, const std::vector<double>& ref_nodes) {
    ModelParams p(c.kappa, c.a);
    const double t0 = now_seconds();
    VelocityGrid grid = VelocityGrid::uniform(c.v_max, c.n_v);
    auto f = GridFunction::sample(grid, [&](double v) { return two_bump_init(v, p, c.u); });
    auto op = fd_build(grid, p);
    FDStepper st(op, c.dt);
    SchemeRun out;
    std::vector<int> capture;
    int n_steps = 0;
    for (double t : c.output_times) {
        capture.push_back(step_index(t, c.dt));
        n_steps = std::max(n_steps, capture.back());
    }
    auto grab = [&](size_t i) {
        out.snapshots.resize(c.output_times.size());
        out.masses.resize(c.output_times.size());
        out.walls.resize(c.output_times.size());
        out.snapshots[i] = interp_to(grid, f.values, ref_nodes);
        out.masses[i] = fd_mass(f);
        out.walls[i] = now_seconds() - t0;
    };
    for (size_t i = 0; i < capture.size(); ++i)
        if (capture[i] == 0) grab(i);
    for (int s = 1; s <= n_steps; ++s) {
        st.step_in_place(f.values);
        for (size_t i = 0; i < capture.size(); ++i)
            if (capture[i] == s) grab(i);
    }
    return out;
}

SchemeRun run_rc(const RunConfig& c, const std::vector<double>& ref_nodes) {
    ModelParams p(c.kappa, 0.0);
    const double t0 = now_seconds();
    const int n_modes = c.n / 2 + 1;
    RCState x = rc_project([&](double v) { return two_bump_init(v, p, c.u); }, n_modes, p);
    auto m = rc_build_matrix(n_modes, p);
    RCStepper st(m, c.dt, c.crank_nicolson);
    SchemeRun out;
    out.snapshots.resize(c.output_times.size());
    out.masses.resize(c.output_times.size());
    out.walls.resize(c.output_times.size());
    std::vector<int> capture;
    int n_steps = 0;
    for (double t : c.output_times) {
        capture.push_back(step_index(t, c.dt));
        n_steps = std::max(n_steps, capture.back());
    }
    auto grab = [&](size_t i) {
        out.masses[i] = rc_mass(x, p);
        out.walls[i] = now_seconds() - t0;
        out.snapshots[i].resize(ref_nodes.size());
        for (size_t j = 0; j < ref_nodes.size(); ++j)
            out.snapshots[i][j] = rc_reconstruct(x, ref_nodes[j], p);
    };
    for (size_t i = 0; i < capture.size(); ++i)
        if (capture[i] == 0) grab(i);
    for (int s = 1; s <= n_steps; ++s) {
        x = st.step(x);
        for (size_t i = 0; i < capture.size(); ++i)
            if (capture[i] == s) grab(i);
    }
    return out;
}

SchemeRun run_gs(const RunConfig& c, const std::vector<double>& ref_nodes) {
    ModelParams p(c.kappa, c.a);
    const double t0 = now_seconds();
    auto tables = gs_build(c.n, p);
    auto theta = gs_stiffness(c.n, tables, p);
    GSState x = gs_project([&](double v) { return two_bump_init(v, p, c.u); }, c.n, tables);
    GSStepper st(theta, tables, c.dt);
    SchemeRun out;
    out.snapshots.resize(c.output_times.size());
    out.masses.resize(c.output_times.size());
    out.walls.resize(c.output_times.size());
    std::vector<int> capture;
    int n_steps = 0;
    for (double t : c.output_times) {
        capture.push_back(step_index(t, c.dt));
        n_steps = std::max(n_steps, capture.back());
    }
    auto grab = [&](size_t i) {
        out.masses[i] = gs_mass(x, tables);
        out.walls[i] = now_seconds() - t0;
        out.snapshots[i].resize(ref_nodes.size());
        for (size_t j = 0; j < ref_nodes.size(); ++j)
            out.snapshots[i][j] = gs_reconstruct(x, ref_nodes[j], tables, p);
    };
    for (size_t i = 0; i < capture.size(); ++i)
        if (capture[i] == 0) grab(i);
    for (int s = 1; s <= n_steps; ++s) {
        x = st.step(x);
        for (size_t i = 0; i < capture.size(); ++i)
            if (capture[i] == s) grab(i);
    }
    return out;
}

/// Maxwellian-perturbation initial condition used by the Hermite scheme;
/// exact coefficients (1, 0, 0.2, 0, 0.1, 0, ...).
double hermite_run_init(double v) {
    return maxwellian(v) + 0.2 * hermite_fn(2, v) + 0.1 * hermite_fn(4, v);
}

} // namespace

RunResult run(const RunConfig& config, const std::string& ref_cache) {
    config.validate();

    if (config.scheme == Scheme::fd_ref) {
        ReferenceConfig rc;
        rc.kappa = config.kappa;
        rc.u = config.u;
        rc.times = config.output_times;
        auto ref = make_reference(rc, ref_cache);
        RunResult result;
        result.ref_nodes = ref.nodes;
        result.snapshots = ref.values;
        for (double t : config.output_times)
            result.reports.push_back({t, 0.0, 0.0, 0.0});
        return result;
    }

    RunResult result;
    if (config.scheme == Scheme::hermite) {
        // exact-evolution oracle run: error against the closed-form coefficients
        const double t0 = now_seconds();
        HermiteState s0 = hermite_project(hermite_run_init, config.n);
        std::vector<double> exact(config.n + 1, 0.0);
        exact[0] = 1.0;
        if (config.n >= 2) exact[2] = 0.2;
        if (config.n >= 4) exact[4] = 0.1;
        for (double t : config.output_times) {
            HermiteState st = hermite_evolve(s0, t);
            double err2 = 0.0;
            for (int k = 0; k <= config.n; ++k) {
                const double ek = exact[k] * std::exp(-double(k) * t);
                err2 += (st.coeffs[k] - ek) * (st.coeffs[k] - ek);
            }
            result.reports.push_back({t, std::abs(hermite_mass(st) - 1.0),
                                      std::sqrt(err2), now_seconds() - t0});
        }
    } else {
        ReferenceConfig rcfg;
        rcfg.kappa = config.kappa;
        rcfg.u = config.u;
        rcfg.times = config.output_times;
        rcfg.t_end = *std::max_element(rcfg.times.begin(), rcfg.times.end());
        auto ref = make_reference(rcfg, ref_cache);
        result.ref_nodes = ref.nodes;

        SchemeRun sr;
        switch (config.scheme) {
            case Scheme::fd: sr = run_fd(config, ref.nodes); break;
            case Scheme::rc: sr = run_rc(config, ref.nodes); break;
            case Scheme::gs: sr = run_gs(config, ref.nodes); break;
            default: throw ConfigError("run: unsupported scheme");
        }
        for (size_t i = 0; i < config.output_times.size(); ++i) {
            const double t = config.output_times[i];
            const double ef = discrete_l2_error(rcfg.v_max, rcfg.n_v + 1,
                                                ref.at_time(t), sr.snapshots[i]);
            result.reports.push_back({t, std::abs(sr.masses[i] - 1.0), ef, sr.walls[i]});
        }
        result.snapshots = std::move(sr.snapshots);
    }

    if (!config.out_dir.empty()) {
        fs::create_directories(config.out_dir);
        std::vector<std::string> comments = {"kfp run", version_string()};
        std::istringstream cfg(config.echo());
        for (std::string line; std::getline(cfg, line);) comments.push_back(line);
        std::vector<std::vector<double>> rows;
        for (const auto& r : result.reports)
            rows.push_back({r.t_star, r.e_m, r.e_f, r.wall_time});
        write_csv(config.out_dir + "/errors.csv", comments, "t,E_m,E_f,wall_time", rows);
        for (size_t i = 0; i < result.snapshots.size(); ++i) {
            std::vector<std::vector<double>> snap;
            snap.reserve(result.ref_nodes.size());
            for (size_t j = 0; j < result.ref_nodes.size(); ++j)
                snap.push_back({result.ref_nodes[j], result.snapshots[i][j]});
            write_csv(config.out_dir + "/snapshot_t" + fmt_label(config.output_times[i]) + ".csv",
                      comments, "v,f", snap);
        }
        std::map<std::string, std::string> kv;
        kv["version"] = version_string();
        std::istringstream cfg2(config.echo());
        for (std::string line; std::getline(cfg2, line);) {
            auto eq = line.find(" = ");
            if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
        }
        double wall = 0.0;
        for (const auto& r : result.reports) wall = std::max(wall, r.wall_time);
        kv["wall_total"] = fmt(wall);
        kv["config_hash"] = fnv1a_hex(config.echo());
        write_manifest(config.out_dir + "/manifest.txt", kv);
    }
    return result;
}

ConvergenceResult convergence_study(const RunConfig& base, std::vector<double> dt_list,
                                    double t_star, const std::string& ref_cache) {
    // warm the reference cache once before fanning out
    {
        ReferenceConfig rcfg;
        rcfg.kappa = base.kappa;
        rcfg.u = base.u;
        rcfg.times = {t_star};
        rcfg.t_end = t_star;
        make_reference(rcfg, ref_cache);
    }
    ConvergenceResult res;
    res.rows.resize(dt_list.size());
    std::vector<std::string> errors(dt_list.size());
    parallel_for_each(int(dt_list.size()), [&](int i) {
        try {
            RunConfig c = base;
            c.dt = dt_list[i];
            c.t_end = t_star;
            c.output_times = {t_star};
            c.out_dir.clear();
            auto r = run(c, ref_cache);
            res.rows[i] = {dt_list[i], r.reports[0].e_f};
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error("convergence_study: " + e);

    res.saturation_floor = res.rows[0].e_f;
    for (const auto& r : res.rows) res.saturation_floor = std::min(res.saturation_floor, r.e_f);
    // fit only rows clearly above the floor
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& r : res.rows) {
        if (r.e_f < 3.0 * res.saturation_floor) continue;
        const double x = std::log(r.dt), y = std::log(r.e_f);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    res.pre_saturation_count = n;
    res.fitted_slope = (n >= 2) ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
    return res;
}

std::vector<ReconstructionRow> reconstruction_study(const RunConfig& base,
                                                    std::vector<int> n_list) {
    ModelParams p(base.kappa, base.a);
    // reconstruction lives on the reference grid, but needs no reference run
    ReferenceConfig rcfg;
    VelocityGrid grid = VelocityGrid::uniform(rcfg.v_max, rcfg.n_v);
    std::vector<double> nodes(grid.nodes().begin() + 1, grid.nodes().end() - 1);
    std::vector<double> fin(nodes.size());
    for (size_t j = 0; j < nodes.size(); ++j) fin[j] = two_bump_init(nodes[j], p, base.u);

    std::vector<ReconstructionRow> rows(n_list.size());
    std::vector<std::string> errors(n_list.size());

    // GS tables are shared across the sweep; build once at the largest N
    std::optional<GSBasisTables> tables;
    if (base.scheme == Scheme::gs) {
        int n_top = *std::max_element(n_list.begin(), n_list.end());
        tables.emplace(gs_modified_chebyshev(n_top + 1, p));
    }

    parallel_for_each(int(n_list.size()), [&](int i) {
        try {
            const int n = n_list[i];
            std::vector<double> rec(nodes.size());
            if (base.scheme == Scheme::rc) {
                RCState s = rc_project([&](double v) { return two_bump_init(v, p, base.u); },
                                       n / 2 + 1, p);
                for (size_t j = 0; j < nodes.size(); ++j)
                    rec[j] = rc_reconstruct(s, nodes[j], p);
            } else if (base.scheme == Scheme::gs) {
                GSState s = gs_project([&](double v) { return two_bump_init(v, p, base.u); },
                                       n, *tables);
                for (size_t j = 0; j < nodes.size(); ++j)
                    rec[j] = gs_reconstruct(s, nodes[j], *tables, p);
            } else {
                throw ConfigError("reconstruction_study: spectral schemes only");
            }
            rows[i] = {n, discrete_l2_error(rcfg.v_max, rcfg.n_v + 1, fin, rec)};
        } catch (const RecurrenceBreakdown& e) {
            errors[i] = std::string("N=") + std::to_string(n_list[i]) + ": " + e.what();
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error("reconstruction_study: " + e);
    return rows;
}

DecayResult decay_study(const RunConfig& config, double fit_t0, double fit_t1) {
    config.validate();
    ModelParams p(config.kappa, config.a);
    DecayResult res;

    const int n_steps = step_index(config.t_end, config.dt);
    const int out_every = std::max(1, n_steps / 2000);

    // mass constant of the stationary state from a quadrature of the datum
    const double mass_in = adaptive_quad(
        [&](double v) { return two_bump_init(v, p, config.u); }, QuadDomain::whole_line);

    if (config.scheme == Scheme::fd) {
        VelocityGrid grid = VelocityGrid::uniform(config.v_max, config.n_v);
        auto f = GridFunction::sample(grid, [&](double v) { return two_bump_init(v, p, config.u); });
        auto op = fd_build(grid, p);
        FDStepper st(op, config.dt);
        auto finf = stationary_state(p, mass_in);
        std::vector<double> w(grid.n_interior()), fe(grid.n_interior());
        for (int j = 1; j <= grid.n_interior(); ++j) {
            fe[j - 1] = finf(grid.node(j));
            w[j - 1] = 1.0 / f_kappa(grid.node(j), p);
        }
        auto norm = [&] {
            double s = 0.0;
            for (int j = 1; j <= grid.n_interior(); ++j) {
                const double d = f.values[j - 1] - fe[j - 1];
                s += grid.cell_length(j) * d * d * w[j - 1];
            }
            return std::sqrt(s);
        };
        res.times.push_back(0.0);
        res.errors.push_back(norm());
        for (int s = 1; s <= n_steps; ++s) {
            st.step_in_place(f.values);
            if (s % out_every == 0 || s == n_steps) {
                res.times.push_back(s * config.dt);
                res.errors.push_back(norm());
            }
        }
    } else if (config.scheme == Scheme::rc) {
        const int n_modes = config.n / 2 + 1;
        RCState x = rc_project([&](double v) { return two_bump_init(v, p, config.u); }, n_modes, p);
        RCState xeq = rc_project([&](double v) { return f_kappa(v, p); }, n_modes, p);
        for (auto& cq : xeq.coeffs) cq *= mass_in;
        auto m = rc_build_matrix(n_modes, p);
        RCStepper st(m, config.dt);
        auto norm = [&] {
            double s = 0.0;
            for (int k = 0; k < n_modes; ++k) {
                const double ck = (k == 0) ? M_PI : M_PI / 2.0;
                const double d = x.coeffs[k] - xeq.coeffs[k];
                s += ck * d * d;
            }
            return std::sqrt(s);
        };
        res.times.push_back(0.0);
        res.errors.push_back(norm());
        for (int s = 1; s <= n_steps; ++s) {
            x = st.step(x);
            if (s % out_every == 0 || s == n_steps) {
                res.times.push_back(s * config.dt);
                res.errors.push_back(norm());
            }
        }
    } else if (config.scheme == Scheme::gs) {
        auto tables = gs_build(config.n, p);
        auto theta = gs_stiffness(config.n, tables, p);
        GSState x = gs_project([&](double v) { return two_bump_init(v, p, config.u); },
                               config.n, tables);
        GSStepper st(theta, tables, config.dt);
        const double nfac = mass_in / tables.gamma[0]; // equilibrium amplitude
        auto norm = [&] {
            double s = 0.0;
            for (int k = 0; k <= config.n; ++k) {
                const double d = x.coeffs[k] - (k == 0 ? nfac : 0.0);
                s += tables.gamma[k] * d * d;
            }
            return std::sqrt(s);
        };
        res.times.push_back(0.0);
        res.errors.push_back(norm());
        for (int s = 1; s <= n_steps; ++s) {
            x = st.step(x);
            if (s % out_every == 0 || s == n_steps) {
                res.times.push_back(s * config.dt);
                res.errors.push_back(norm());
            }
        }
    } else {
        throw ConfigError("decay_study: fd, rc or gs schemes only");
    }

    // saturation onset and the two fits over [fit_t0, fit_t1]
    size_t imin = 0;
    for (size_t i = 1; i < res.errors.size(); ++i)
        if (res.errors[i] < res.errors[imin]) imin = i;
    res.saturation_time = res.times[imin];

    double sx = 0, sy = 0, sxx = 0, sxy = 0, lx = 0, ly = 0, lxx = 0, lxy = 0, lyy = 0;
    int n = 0;
    for (size_t i = 0; i < res.times.size(); ++i) {
        const double t = res.times[i], e = res.errors[i];
        if (t < fit_t0 || t > fit_t1 || e <= 0.0) continue;
        const double xl = std::log(t), yl = std::log(e);
        sx += xl;
        sy += yl;
        sxx += xl * xl;
        sxy += xl * yl;
        lx += t;
        ly += yl;
        lxx += t * t;
        lxy += t * yl;
        lyy += yl * yl;
        ++n;
    }
    if (n >= 2) {
        res.loglog_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        res.loglog_slope_squared = 2.0 * res.loglog_slope;
        const double b = (n * lxy - lx * ly) / (n * lxx - lx * lx);
        res.exp_rate = -b;
        const double abar = (ly - b * lx) / n;
        double ss_res = 0, ss_tot = 0;
        const double ymean = ly / n;
        for (size_t i = 0; i < res.times.size(); ++i) {
            const double t = res.times[i], e = res.errors[i];
            if (t < fit_t0 || t > fit_t1 || e <= 0.0) continue;
            const double yl = std::log(e);
            ss_res += (yl - (abar + b * t)) * (yl - (abar + b * t));
            ss_tot += (yl - ymean) * (yl - ymean);
        }
        res.exp_r2 = (ss_tot > 0) ? 1.0 - ss_res / ss_tot : 0.0;
    } else {
        res.loglog_slope = res.loglog_slope_squared = res.exp_rate = res.exp_r2 = 0.0;
    }
    return res;
}

TraceResult coefficient_trace(const RunConfig& config) {
    config.validate();
    ModelParams p(config.kappa, config.a);
    TraceResult res;
    const int n_steps = step_index(config.t_end, config.dt);
    const int out_every = std::max(1, n_steps / 400);

    auto record = [&](double t, const std::vector<double>& c) {
        res.times.push_back(t);
        res.coeffs.push_back(c);
    };

    if (config.scheme == Scheme::rc) {
        const int n_modes = config.n / 2 + 1;
        RCState x = rc_project([&](double v) { return two_bump_init(v, p, config.u); }, n_modes, p);
        auto m = rc_build_matrix(n_modes, p);
        RCStepper st(m, config.dt);
        record(0.0, x.coeffs);
        for (int s = 1; s <= n_steps; ++s) {
            x = st.step(x);
            if (s % out_every == 0 || s == n_steps) record(s * config.dt, x.coeffs);
        }
        res.final_coeffs = x.coeffs;
        // continue the same evolution until the vector stops moving
        double change = 1.0;
        int s = n_steps;
        const int s_cap = n_steps + int(4000.0 / config.dt);
        while (change > 1e-13 && s < s_cap) {
            RCState y = st.step(x);
            change = 0.0;
            for (size_t k = 0; k < y.coeffs.size(); ++k)
                change = std::max(change, std::abs(y.coeffs[k] - x.coeffs[k]));
            x = y;
            ++s;
        }
        res.settled_coeffs = x.coeffs;
        res.settled_time = s * config.dt;
    } else if (config.scheme == Scheme::gs) {
        auto tables = gs_build(config.n, p);
        auto theta = gs_stiffness(config.n, tables, p);
        GSState x = gs_project([&](double v) { return two_bump_init(v, p, config.u); },
                               config.n, tables);
        GSStepper st(theta, tables, config.dt);
        record(0.0, x.coeffs);
        for (int s = 1; s <= n_steps; ++s) {
            x = st.step(x);
            if (s % out_every == 0 || s == n_steps) record(s * config.dt, x.coeffs);
        }
        res.final_coeffs = x.coeffs;
        double change = 1.0;
        int s = n_steps;
        const int s_cap = n_steps + int(4000.0 / config.dt);
        while (change > 1e-13 && s < s_cap) {
            GSState y = st.step(x);
            change = 0.0;
            for (size_t k = 0; k < y.coeffs.size(); ++k)
                change = std::max(change, std::abs(y.coeffs[k] - x.coeffs[k]));
            x = y;
            ++s;
        }
        res.settled_coeffs = x.coeffs;
        res.settled_time = s * config.dt;
    } else {
        throw ConfigError("coefficient_trace: spectral schemes only");
    }
    return res;
}

void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const std::string& header, const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& c : comments) out << "# " << c << "\n";
    out << header << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << fmt(row[i]);
        out << "\n";
    }
}

void write_manifest(const std::string& path, const std::map<std::string, std::string>& kv) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
}

void write_gnuplot_pair(const std::string& stem, const std::string& title,
                        const std::string& xlabel, const std::string& ylabel,
                        bool logx, bool logy, const std::vector<std::string>& column_titles,
                        const std::vector<std::vector<double>>& rows) {
    {
        std::ofstream dat(stem + ".dat");
        if (!dat) throw std::runtime_error("cannot write " + stem + ".dat");
        dat << "#";
        for (const auto& c : column_titles) dat << " " << c;
        dat << "\n";
        for (const auto& row : rows) {
            for (size_t i = 0; i < row.size(); ++i) dat << (i ? " " : "") << fmt(row[i]);
            dat << "\n";
        }
    }
    std::ofstream gp(stem + ".gp");
    if (!gp) throw std::runtime_error("cannot write " + stem + ".gp");
    gp << "set title '" << title << "'\n"
       << "set xlabel '" << xlabel << "'\nset ylabel '" << ylabel << "'\n";
    if (logx) gp << "set logscale x\n";
    if (logy) gp << "set logscale y\n";
    const std::string base = fs::path(stem).filename().string();
    gp << "plot";
    for (size_t i = 1; i < column_titles.size(); ++i)
        gp << (i > 1 ? "," : "") << " '" << base << ".dat' using 1:" << (i + 1)
           << " with linespoints title '" << column_titles[i] << "'";
    gp << "\n";
}

void parallel_for_each(int n_tasks, const std::function<void(int)>& task, int max_workers) {
    if (n_tasks <= 0) return;
    int workers = max_workers > 0 ? max_workers : int(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, n_tasks));
    if (workers == 1) {
        for (int i = 0; i < n_tasks; ++i) task(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) task(i);
        });
    for (auto& t : pool) t.join();
}

} // namespace kfp
