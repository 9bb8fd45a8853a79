#pragma once

#include "kfp/model.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kfp {

enum class Scheme { fd, fd_ref, rc, gs, hermite };

Scheme scheme_from_string(const std::string& s);
std::string scheme_to_string(Scheme s);

/// One solver execution: scheme, model and discretization parameters, output
/// times and destination directory.
struct RunConfig {
    Scheme scheme = Scheme::fd;
    double kappa = 3.0;
    double a = 0.0;
    double u = 2.0;    // bump shift of the initial condition
    int n = 8;         // spectral truncation (N_RC or N_GS)
    int n_v = 1000;    // velocity cells
    double v_max = 30.0;
    double dt = 0.01;
    double t_end = 10.0;
    bool crank_nicolson = false; // RC scheme only
    std::vector<double> output_times = {0.2, 2.0, 10.0};
    std::string out_dir;

    void validate() const;
    std::string echo() const; // key=value lines
};

struct ErrorReport {
    double t_star;
    double e_m;       // |mass - 1|
    double e_f;       // discrete L2_v error against the reference
    double wall_time; // seconds since scheme setup started
};

/// Reference solution: the finite-volume run on the large domain, pinned to
/// v_max=1000, N_v=10000 cells, dt=1e-3, T=10 unless the caller overrides.
struct ReferenceConfig {
    double kappa = 3.0;
    double u = 2.0;
    double v_max = 1000.0;
    int n_v = 10000;
    double dt = 1e-3;
    double t_end = 10.0;
    std::vector<double> times = {0.2, 2.0, 10.0};

    std::string echo() const;
    std::string content_hash() const;
};

struct ReferenceSolution {
    ReferenceConfig config;
    std::vector<double> nodes; // interior nodes
    std::vector<std::vector<double>> values; // values[time index][node]

    const std::vector<double>& at_time(double t) const;
};

/// Builds the reference by running the FD scheme; cached on disk under
/// cache_dir as fdref_<hash>.csv (CSV: comment header, then v,f_t<t1>,...).
ReferenceSolution make_reference(const ReferenceConfig& cfg,
                                 const std::string& cache_dir);

struct RunResult {
    std::vector<ErrorReport> reports;
    // snapshots on the reference interior nodes, one per output time
    std::vector<std::vector<double>> snapshots;
    std::vector<double> ref_nodes;
};

/// Executes the configured scheme from the two-bump initial condition and
/// reports mass/L2 errors against the reference at every output time.
/// Writes errors.csv, per-time snapshot files and manifest.txt into out_dir
/// (if set). ref_cache names the reference cache directory.
RunResult run(const RunConfig& config, const std::string& ref_cache);

struct ConvergenceRow {
    double dt;
    double e_f;
};
struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    double fitted_slope;     // log-log fit over the pre-saturation rows
    double saturation_floor; // smallest error in the sweep
    int pre_saturation_count;
};
/// Reruns the scheme over a descending dt list at fixed truncation, reporting
/// E_f(t_star); the slope is fitted where errors are above 3x the floor.
ConvergenceResult convergence_study(const RunConfig& base, std::vector<double> dt_list,
                                    double t_star, const std::string& ref_cache);

struct ReconstructionRow {
    int n;
    double error;
};
/// Projects the initial condition at each N and reports the discrete L2_v
/// reconstruction error on the reference grid (no time evolution involved).
std::vector<ReconstructionRow> reconstruction_study(const RunConfig& base,
                                                    std::vector<int> n_list);

struct DecayResult {
    std::vector<double> times;
    std::vector<double> errors;     // ||f(t) - f_inf|| in the weighted norm
    double loglog_slope;            // algebraic fit over the window
    double loglog_slope_squared;    // same fit for the squared error curve
    double exp_rate;                // log-linear fit: error ~ C e^{-rate t}
    double exp_r2;                  // R^2 of the log-linear fit
    double saturation_time;         // argmin of the error curve
};
/// Tracks the weighted-norm distance to the stationary state and fits both an
/// algebraic (log-log) and an exponential (log-linear) decay law over
/// [fit_t0, fit_t1].
DecayResult decay_study(const RunConfig& config, double fit_t0, double fit_t1);

struct TraceResult {
    std::vector<double> times;
    std::vector<std::vector<double>> coeffs; // coeffs[i] at times[i]
    std::vector<double> final_coeffs;
    std::vector<double> settled_coeffs; // evolution continued until stationary
    double settled_time;
};
/// Coefficient trajectories of a spectral scheme; after t_end the evolution is
/// continued until the coefficient vector stops moving (reported separately).
TraceResult coefficient_trace(const RunConfig& config);

// --- output helpers (CSV with '#' comments, key=value manifests, gnuplot) ---

void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const std::string& header, const std::vector<std::vector<double>>& rows);
void write_manifest(const std::string& path, const std::map<std::string, std::string>& kv);
/// Writes <stem>.dat (whitespace columns) and <stem>.gp (plot commands).
void write_gnuplot_pair(const std::string& stem, const std::string& title,
                        const std::string& xlabel, const std::string& ylabel,
                        bool logx, bool logy, const std::vector<std::string>& column_titles,
                        const std::vector<std::vector<double>>& rows);

/// FNV-1a content hash of a string, hex-encoded.
std::string fnv1a_hex(const std::string& s);

/// Runs tasks on a bounded pool of worker threads; results land by index.
void parallel_for_each(int n_tasks, const std::function<void(int)>& task,
                       int max_workers = 0);

std::string version_string();

} // namespace kfp
