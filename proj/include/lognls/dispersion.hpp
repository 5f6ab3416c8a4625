#pragma once

#include <iosfwd>
#include <vector>

#include "lognls/errors.hpp"

namespace lognls::dispersion {

/// Solution of the dilation ODE
///     tau'' = 2*lambda / tau,   tau(0) = 1,  tau'(0) = 0,
/// stored as accepted integrator knots; queries between knots use cubic
/// Hermite interpolation with the ODE supplying second derivatives.
/// The trajectory satisfies the first integral tau'^2 = 4*lambda*ln(tau);
/// its residual ("defect") is tracked and kept within the corrector budget.
struct TauTrajectory {
    double lambda = 1.0;
    double rel_tol = 1e-10;

    std::vector<double> t;
    std::vector<double> tau;
    std::vector<double> tau_dot;

    // first-integral projection bookkeeping
    int corrections = 0;
    double max_correction = 0.0; // largest relative adjustment applied to tau'

    double t_end() const { return t.empty() ? 0.0 : t.back(); }

    double tau_at(double tq) const;
    double tau_dot_at(double tq) const;
    /// tau'(t)^2 - 4*lambda*ln(tau(t)) at an arbitrary query time.
    double first_integral_defect(double tq) const;

    /// CSV with header t,tau,tau_dot,first_integral_defect at full precision.
    void write_csv(std::ostream& os) const;

private:
    std::size_t locate(double tq) const;
};

/// Integrate the dilation ODE up to t_end. Long horizons are split into
/// half-decade blocks; at block ends (and whenever the running defect leaves
/// its budget) tau' is projected back onto the first integral. Corrections
/// larger than 10*rel_tol are a hard failure, never applied silently.
TauTrajectory solve_tau(double lambda, double t_end, double rel_tol = 1e-10);

/// Leading-order dispersion law (2t*sqrt(lambda*ln t), 2*sqrt(lambda*ln t)).
/// Only meaningful for t > e.
struct TauAsymptotic {
    double tau;
    double tau_dot;
};
TauAsymptotic tau_asymptotic(double t, double lambda);

/// Convergence-rate scale ln(ln t)/ln(t), defined for t > e; decreasing
/// beyond t = e^e.
double ell(double t);

/// Slow time s = 0.5*ln(tau'(t)); grows like 0.25*ln(ln t). Requires t > 0.
double s_of_t(const TauTrajectory& traj, double t);

} // namespace lognls::dispersion
