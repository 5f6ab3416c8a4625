#include "lognls/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "lognls/format.hpp"
#include "lognls/ode.hpp"

namespace lognls::dispersion {

namespace {

double defect_of(double lambda, double tau, double tau_dot) {
    return tau_dot * tau_dot - 4.0 * lambda * std::log(tau);
}

} // namespace

std::size_t TauTrajectory::locate(double tq) const {
    if (t.empty()) throw validation_error("tau trajectory: empty");
    if (tq < t.front() || tq > t.back())
        throw validation_error("tau trajectory: query time outside [0, t_end]");
    // index of the knot interval [t[i], t[i+1]] containing tq
    auto it = std::upper_bound(t.begin(), t.end(), tq);
    std::size_t i = static_cast<std::size_t>(it - t.begin());
    if (i > 0) --i;
    if (i + 1 >= t.size()) i = t.size() - 2;
    return i;
}

double TauTrajectory::tau_at(double tq) const {
    if (t.size() == 1) return tau.front();
    const std::size_t i = locate(tq);
    return hermite_eval(tq, t[i], tau[i], tau_dot[i], t[i + 1], tau[i + 1], tau_dot[i + 1]);
}

double TauTrajectory::tau_dot_at(double tq) const {
    if (t.size() == 1) return tau_dot.front();
    const std::size_t i = locate(tq);
    // second derivative from the ODE itself
    const double dd0 = 2.0 * lambda / tau[i];
    const double dd1 = 2.0 * lambda / tau[i + 1];
    return hermite_eval(tq, t[i], tau_dot[i], dd0, t[i + 1], tau_dot[i + 1], dd1);
}

double TauTrajectory::first_integral_defect(double tq) const {
    return defect_of(lambda, tau_at(tq), tau_dot_at(tq));
}

void TauTrajectory::write_csv(std::ostream& os) const {
    os << "t,tau,tau_dot,first_integral_defect\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
        os << fmt_g17(t[i]) << ',' << fmt_g17(tau[i]) << ',' << fmt_g17(tau_dot[i]) << ','
           << fmt_g17(defect_of(lambda, tau[i], tau_dot[i])) << '\n';
    }
}

TauTrajectory solve_tau(double lambda, double t_end, double rel_tol) {
    if (!(lambda > 0.0)) throw validation_error("solve_tau: lambda must be positive");
    if (!(t_end >= 0.0)) throw validation_error("solve_tau: t_end must be nonnegative");
    if (!(rel_tol >= 1e-14 && rel_tol <= 1e-2))
        throw validation_error("solve_tau: rel_tol out of range [1e-14, 1e-2]");

    TauTrajectory traj;
    traj.lambda = lambda;
    traj.rel_tol = rel_tol;

    auto rhs = [lambda](double, const double* y, double* dy) {
        dy[0] = y[1];
        dy[1] = 2.0 * lambda / y[0];
    };

    // Half-decade block boundaries: 1, sqrt(10), 10, ... Restarting blocks
    // bounds invariant drift between projections on long horizons.
    std::vector<double> stops;
    for (double b = 1.0; b < t_end; b *= 3.16227766016837933) stops.push_back(b);
    stops.push_back(t_end);

    std::vector<double> y = {1.0, 0.0};
    double t0 = 0.0;
    const double budget = 10.0 * rel_tol;

    traj.t.push_back(0.0);
    traj.tau.push_back(1.0);
    traj.tau_dot.push_back(0.0);

    OdeOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = rel_tol * 1e-2;
    opt.h_init = 1e-4;

    auto project = [&](double& tau, double& tau_dot) {
        const double target_sq = 4.0 * lambda * std::log(tau);
        if (target_sq <= 0.0) return; // only at tau ~ 1 where the integral vanishes
        const double proj = std::sqrt(target_sq);
        const double rel = std::abs(proj - tau_dot) / std::max(1.0, std::abs(tau_dot));
        if (rel > budget)
            throw convergence_error("solve_tau: first-integral drift " + std::to_string(rel) +
                                    " exceeds corrector budget");
        if (rel > 0.0) {
            traj.corrections++;
            traj.max_correction = std::max(traj.max_correction, rel);
            tau_dot = proj;
        }
    };

    for (double stop : stops) {
        if (stop <= t0) continue;
        // cap the step at 1% of the local time scale: the cubic Hermite
        // interpolant between knots must hold the defect budget, not just
        // the knots themselves
        opt.h_max = 0.01 * std::max(stop / 3.16227766016837933, 1.0);
        auto knots = ode_integrate(rhs, t0, y, stop, opt);
        for (std::size_t i = 1; i < knots.size(); ++i) {
            double ta = knots[i].y[0];
            double td = knots[i].y[1];
            // keep the stored trajectory on the first-integral manifold
            const double d = defect_of(lambda, ta, td);
            if (std::abs(d) > 0.5 * budget * (1.0 + td * td)) project(ta, td);
            traj.t.push_back(knots[i].t);
            traj.tau.push_back(ta);
            traj.tau_dot.push_back(td);
        }
        y = {traj.tau.back(), traj.tau_dot.back()};
        project(y[0], y[1]);
        traj.tau.back() = y[0];
        traj.tau_dot.back() = y[1];
        t0 = stop;
        opt.h_init = std::max(1e-4, 1e-3 * t0);
    }
    return traj;
}

TauAsymptotic tau_asymptotic(double t, double lambda) {
    if (!(lambda > 0.0)) throw validation_error("tau_asymptotic: lambda must be positive");
    if (!(t > 2.718281828459045235))
        throw validation_error("tau_asymptotic: defined only for t > e");
    const double root = std::sqrt(lambda * std::log(t));
    return {2.0 * t * root, 2.0 * root};
}

double ell(double t) {
    if (!(t > 2.718281828459045235)) throw validation_error("ell: defined only for t > e");
    const double lt = std::log(t);
    return std::log(lt) / lt;
}

double s_of_t(const TauTrajectory& traj, double t) {
    if (!(t > 0.0)) throw validation_error("s_of_t: t must be positive");
    const double td = traj.tau_dot_at(t);
    if (!(td > 0.0)) throw validation_error("s_of_t: tau' not positive at query time");
    return 0.5 * std::log(td);
}

} // namespace lognls::dispersion
