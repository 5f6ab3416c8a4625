#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "lognls/errors.hpp"

namespace lognls {

/// Accepted integration step: state and RHS value at time t.
struct OdeKnot {
    double t;
    std::vector<double> y;
    std::vector<double> f; // dy/dt at (t, y)
};

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double h_init = 1e-4;
    double h_max = 0.0; // 0 = unlimited
    std::size_t max_steps = 20000000;
};

/// Cubic Hermite interpolation of one solution component between two knots.
/// Uses values and stored derivatives at both ends; O(h^4) locally, which
/// matches the order-(>=4) accuracy of the accepted knots themselves.
inline double hermite_eval(double t, double t0, double y0, double f0, double t1, double y1,
                           double f1) {
    const double h = t1 - t0;
    const double th = (t - t0) / h;
    const double th2 = th * th, th3 = th2 * th;
    return (2 * th3 - 3 * th2 + 1) * y0 + (th3 - 2 * th2 + th) * h * f0 +
           (-2 * th3 + 3 * th2) * y1 + (th3 - th2) * h * f1;
}

/// Adaptive embedded Runge-Kutta, the Dormand-Prince 5(4) pair with FSAL.
/// Integrates rhs(t, y, dydt) from t0 to t1 (t1 > t0) and records every
/// accepted step. Error control is mixed absolute/relative per component.
template <typename Rhs>
std::vector<OdeKnot> ode_integrate(Rhs&& rhs, double t0, std::vector<double> y0, double t1,
                                   const OdeOptions& opt = {}) {
    static const double c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static const double a2[] = {1.0 / 5};
    static const double a3[] = {3.0 / 40, 9.0 / 40};
    static const double a4[] = {44.0 / 45, -56.0 / 15, 32.0 / 9};
    static const double a5[] = {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729};
    static const double a6[] = {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
                                -5103.0 / 18656};
    static const double a7[] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784,
                                11.0 / 84};
    // b - b*: difference between the 5th and embedded 4th order weights
    static const double e[7] = {71.0 / 57600,   0.0,        -71.0 / 16695, 71.0 / 1920,
                                -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

    if (!(t1 >= t0)) throw validation_error("ode: end time must be >= start time");
    const std::size_t dim = y0.size();
    std::vector<OdeKnot> knots;

    std::vector<double> y = std::move(y0), ynew(dim), yerr(dim), ytmp(dim);
    std::vector<double> k[7];
    for (auto& ki : k) ki.assign(dim, 0.0);

    rhs(t0, y.data(), k[0].data());
    knots.push_back({t0, y, k[0]});
    if (t1 == t0) return knots;

    double t = t0;
    double h = std::min(opt.h_init, t1 - t0);
    const double hmax = opt.h_max > 0 ? opt.h_max : (t1 - t0);

    for (std::size_t step = 0; step < opt.max_steps; ++step) {
        if (t >= t1) return knots;
        h = std::min({h, hmax, t1 - t});
        if (h < 4e-16 * std::max(1.0, std::abs(t)))
            throw convergence_error("ode: step size underflow at t=" + std::to_string(t));

        auto stage = [&](const double* aa, int m, double cc) {
            for (std::size_t i = 0; i < dim; ++i) {
                double s = 0.0;
                for (int j = 0; j < m; ++j) s += aa[j] * k[j][i];
                ytmp[i] = y[i] + h * s;
            }
            rhs(t + cc * h, ytmp.data(), k[m].data());
        };
        stage(a2, 1, c[1]);
        stage(a3, 2, c[2]);
        stage(a4, 3, c[3]);
        stage(a5, 4, c[4]);
        stage(a6, 5, c[5]);
        // 5th order solution (also stage 7 via FSAL)
        for (std::size_t i = 0; i < dim; ++i) {
            double s = 0.0;
            for (int j = 0; j < 6; ++j) s += a7[j] * k[j][i];
            ynew[i] = y[i] + h * s;
        }
        rhs(t + h, ynew.data(), k[6].data());

        double errnorm = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            double s = 0.0;
            for (int j = 0; j < 7; ++j) s += e[j] * k[j][i];
            const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double q = h * s / sc;
            errnorm += q * q;
        }
        errnorm = std::sqrt(errnorm / dim);

        if (errnorm <= 1.0) {
            t += h;
            y.swap(ynew);
            k[0].swap(k[6]); // FSAL
            knots.push_back({t, y, k[0]});
        }
        const double fac = errnorm > 0 ? 0.9 * std::pow(errnorm, -0.2) : 5.0;
        h *= std::clamp(fac, 0.2, 5.0);
    }
    throw convergence_error("ode: step budget exhausted before t=" + std::to_string(t1));
}

} // namespace lognls
