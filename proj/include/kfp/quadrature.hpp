#pragma once

#include <functional>

namespace kfp {

enum class QuadDomain { whole_line, half_line };

struct QuadOptions {
    double rel_tol = 1e-12;
    double abs_tol = 0.0;      // extra absolute target, 0 = relative only
    double abs_floor = 1e-300; // never refine below this total error
    double map_scale = 1.0;    // scale of the compactifying map v = L x/sqrt(1-x^2)
    int max_intervals = 4000;
};

struct QuadResult {
    double value;
    double error_estimate;
    int evaluations;
};

/// Integral of f over a finite interval [a,b], globally adaptive Gauss-Kronrod 7-15.
QuadResult adaptive_quad_interval(const std::function<double(double)>& f,
                                  double a, double b, const QuadOptions& opts = {});

/// Integral of f over the whole line or the half line [0,inf), using the
/// compactifying substitution v = L x / sqrt(1 - x^2). Throws AccuracyError
/// when the error estimate cannot be pushed below the requested tolerance.
double adaptive_quad(const std::function<double(double)>& f, QuadDomain mode,
                     const QuadOptions& opts = {});

/// Composite Gauss-Legendre (5 nodes per panel) on [a,b]; no endpoint evaluations.
double composite_gl5(const std::function<double(double)>& f, double a, double b,
                     int panels);

} // namespace kfp
