#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include "lognls/grid.hpp"

namespace lognls::gaussian {

/// Initial Gaussian datum u0(x) = b0 * prod_j exp(-a0[j]*(x_j - x0[j])^2 / 2)
/// with Re(a0[j]) > 0 and b0 != 0.
struct GaussianInit {
    cplx b0{1.0, 0.0};
    std::vector<cplx> a0;  // one entry per axis
    std::vector<double> x0; // center, one entry per axis (defaults to 0)
};

/// Per-axis width dynamics
///     r'' = alpha0^2/r^3 + 2*lambda*alpha0/r,  r(0) = 1,  r'(0) = -beta0,
/// with a0 = alpha0 + i*beta0, plus the accumulated integrals of
/// a(t) = alpha0/r^2 - i r'/r needed to reassemble the amplitude factor.
/// Im integral of a equals -ln r identically; the stored value is pinned to
/// that identity and the raw quadrature kept only as a consistency defect.
struct AxisTrack {
    double alpha0 = 1.0;
    double beta0 = 0.0;
    double lambda = 1.0; // copied from the owning trajectory for interpolation

    std::vector<double> t;
    std::vector<double> r;
    std::vector<double> r_dot;
    std::vector<double> reA;     // integral of Re a = alpha0/r^2
    std::vector<double> imA_raw; // integral of -r'/r, kept for defect reporting
    std::vector<double> intImA;  // integral of Im A = integral of -ln r

    int corrections = 0;
    double max_correction = 0.0;
    double max_identity_defect = 0.0; // worst |imA_raw + ln r| seen at knots

    double r_at(double tq) const;
    double r_dot_at(double tq) const;
    double reA_at(double tq) const;
    double imA_at(double tq) const { return -std::log(r_at(tq)); }
    double intImA_at(double tq) const;
    double first_integral(double r, double r_dot, double lambda) const;
    /// Smallest width the axis can reach: exp(-(beta0^2+alpha0^2)/(4*lambda*alpha0)).
    double lower_bound(double lambda) const;

private:
    std::size_t locate(double tq) const;
    friend struct GaussianTrajectory;
};

struct GaussianTrajectory {
    GaussianInit init;
    double lambda = 1.0;
    double rel_tol = 1e-10;
    std::vector<AxisTrack> axes;

    int dim() const { return static_cast<int>(axes.size()); }
    double t_end() const { return axes.empty() ? 0.0 : axes.front().t.back(); }

    /// Complex width a_j(t) = alpha0/r^2 - i r'/r.
    cplx a(int axis, double t) const;
    /// Amplitude b(t) = b0 * exp(-i*lambda*t*ln|b0|^2 - (i/2)*sum A_j - i*lambda*sum int Im A_j).
    cplx b(double t) const;

    /// CSV per axis: t, r, r_dot, first_integral_defect, ReA, ImA.
    void write_axis_csv(int axis, std::ostream& os) const;
};

GaussianTrajectory evolve_gaussian(const GaussianInit& init, double lambda, double t_end,
                                   double rel_tol = 1e-10);

/// a = alpha0/r^2 - i*(r'/r); rejects r <= 0.
cplx reconstruct_a(double r, double r_dot, double alpha0);

/// Sample u(t, x) on a grid. Throws a truncation error (with the measured
/// mass defect) when the box does not cover six standard deviations of the
/// modulus around the center on every axis.
WaveField gaussian_field(const GaussianTrajectory& traj, double t, const Grid& grid);

/// ||u(t)||_{L^p} = (2*pi/p)^{d/(2p)} |b| / prod_j (Re a_j)^{1/(2p)}; p in [1, inf].
double gaussian_lp_norm(const GaussianTrajectory& traj, double t, double p);

/// Leading-order width growth 2*t*sqrt(lambda*alpha0*ln t), for t > e.
double r_asymptotic(double t, double lambda, double alpha0);

/// Exact squared L^2 mass |b|^2 prod_j sqrt(pi / Re a_j).
double gaussian_mass(const GaussianTrajectory& traj, double t);

/// Exact ||grad u(t)||_{L^2}^2 (any dimension).
double gaussian_grad_sq(const GaussianTrajectory& traj, double t);

/// Exact homogeneous Sobolev norm ||u(t)||_{H^s} for s in (0, 1], d = 1 only.
double gaussian_hs_norm(const GaussianTrajectory& traj, double t, double s);

/// Conserved energy 0.5*||grad u||^2 + lambda * int |u|^2 ln|u|^2.
double gaussian_energy(const GaussianTrajectory& traj, double t);

} // namespace lognls::gaussian
