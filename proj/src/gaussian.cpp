#include "lognls/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "lognls/format.hpp"
#include "lognls/ode.hpp"

namespace lognls::gaussian {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kE = 2.718281828459045235;
} // namespace

std::size_t AxisTrack::locate(double tq) const {
    if (t.empty()) throw validation_error("gaussian axis: empty trajectory");
    if (tq < t.front() || tq > t.back())
        throw validation_error("gaussian axis: query time outside [0, t_end]");
    auto it = std::upper_bound(t.begin(), t.end(), tq);
    std::size_t i = static_cast<std::size_t>(it - t.begin());
    if (i > 0) --i;
    if (i + 1 >= t.size()) i = t.size() - 2;
    return i;
}

double AxisTrack::first_integral(double rv, double rd, double lambda) const {
    const double F = beta0 * beta0 + alpha0 * alpha0 * (1.0 - 1.0 / (rv * rv)) +
                     4.0 * lambda * alpha0 * std::log(rv);
    return rd * rd - F;
}

double AxisTrack::lower_bound(double lambda) const {
    return std::exp(-(beta0 * beta0 + alpha0 * alpha0) / (4.0 * lambda * alpha0));
}

double AxisTrack::r_at(double tq) const {
    if (t.size() == 1) return r.front();
    const std::size_t i = locate(tq);
    return hermite_eval(tq, t[i], r[i], r_dot[i], t[i + 1], r[i + 1], r_dot[i + 1]);
}

double AxisTrack::r_dot_at(double tq) const {
    if (t.size() == 1) return r_dot.front();
    const std::size_t i = locate(tq);
    auto dd = [this](std::size_t j) {
        const double rv = r[j];
        return alpha0 * alpha0 / (rv * rv * rv) + 2.0 * lambda * alpha0 / rv;
    };
    return hermite_eval(tq, t[i], r_dot[i], dd(i), t[i + 1], r_dot[i + 1], dd(i + 1));
}

double AxisTrack::reA_at(double tq) const {
    if (t.size() == 1) return reA.front();
    const std::size_t i = locate(tq);
    auto dre = [this](std::size_t j) { return alpha0 / (r[j] * r[j]); };
    return hermite_eval(tq, t[i], reA[i], dre(i), t[i + 1], reA[i + 1], dre(i + 1));
}

double AxisTrack::intImA_at(double tq) const {
    if (t.size() == 1) return intImA.front();
    const std::size_t i = locate(tq);
    return hermite_eval(tq, t[i], intImA[i], -std::log(r[i]), t[i + 1], intImA[i + 1],
                        -std::log(r[i + 1]));
}

cplx GaussianTrajectory::a(int axis, double t) const {
    const AxisTrack& ax = axes.at(axis);
    return reconstruct_a(ax.r_at(t), ax.r_dot_at(t), ax.alpha0);
}

cplx GaussianTrajectory::b(double t) const {
    const double L0 = std::log(std::norm(init.b0));
    double logmag = 0.0;  // sum of Im A_j / 2 = -(1/2) sum ln r_j
    double phase = lambda * t * L0;
    for (const auto& ax : axes) {
        const double rv = ax.r_at(t);
        logmag -= 0.5 * std::log(rv);
        phase += 0.5 * ax.reA_at(t) + lambda * ax.intImA_at(t);
    }
    return init.b0 * std::exp(logmag) * std::exp(cplx(0.0, -phase));
}

void GaussianTrajectory::write_axis_csv(int axis, std::ostream& os) const {
    const AxisTrack& ax = axes.at(axis);
    os << "t,r,r_dot,first_integral_defect,ReA,ImA\n";
    for (std::size_t i = 0; i < ax.t.size(); ++i) {
        os << fmt_g17(ax.t[i]) << ',' << fmt_g17(ax.r[i]) << ',' << fmt_g17(ax.r_dot[i]) << ','
           << fmt_g17(ax.first_integral(ax.r[i], ax.r_dot[i], lambda)) << ','
           << fmt_g17(ax.reA[i]) << ',' << fmt_g17(-std::log(ax.r[i])) << '\n';
    }
}

GaussianTrajectory evolve_gaussian(const GaussianInit& init, double lambda, double t_end,
                                   double rel_tol) {
    if (!(lambda > 0.0)) throw validation_error("evolve_gaussian: lambda must be positive");
    if (std::norm(init.b0) == 0.0) throw validation_error("evolve_gaussian: b0 must be nonzero");
    if (init.a0.empty() || init.a0.size() > 3)
        throw validation_error("evolve_gaussian: need 1 to 3 width parameters");
    if (!init.x0.empty() && init.x0.size() != init.a0.size())
        throw validation_error("evolve_gaussian: center size must match width size");
    for (const cplx& a0 : init.a0)
        if (!(a0.real() > 0.0))
            throw validation_error("evolve_gaussian: Re(a0) must be positive on every axis");
    if (!(t_end >= 0.0)) throw validation_error("evolve_gaussian: t_end must be nonnegative");
    if (!(rel_tol >= 1e-14 && rel_tol <= 1e-2))
        throw validation_error("evolve_gaussian: rel_tol out of range [1e-14, 1e-2]");

    GaussianTrajectory traj;
    traj.init = init;
    if (traj.init.x0.empty()) traj.init.x0.assign(init.a0.size(), 0.0);
    traj.lambda = lambda;
    traj.rel_tol = rel_tol;

    const double budget = 10.0 * rel_tol;

    for (const cplx& a0 : init.a0) {
        AxisTrack ax;
        ax.alpha0 = a0.real();
        ax.beta0 = a0.imag();
        ax.lambda = lambda;
        const double rmin = ax.lower_bound(lambda);

        auto rhs = [&ax, lambda](double, const double* y, double* dy) {
            const double rv = y[0];
            dy[0] = y[1];
            dy[1] = ax.alpha0 * ax.alpha0 / (rv * rv * rv) + 2.0 * lambda * ax.alpha0 / rv;
            dy[2] = ax.alpha0 / (rv * rv);
            dy[3] = -y[1] / rv;
            dy[4] = -std::log(rv);
        };

        std::vector<double> stops;
        for (double bdry = 1.0; bdry < t_end; bdry *= 3.16227766016837933) stops.push_back(bdry);
        stops.push_back(t_end);

        std::vector<double> y = {1.0, -ax.beta0, 0.0, 0.0, 0.0};
        double t0 = 0.0;

        ax.t.push_back(0.0);
        ax.r.push_back(1.0);
        ax.r_dot.push_back(-ax.beta0);
        ax.reA.push_back(0.0);
        ax.imA_raw.push_back(0.0);
        ax.intImA.push_back(0.0);

        OdeOptions opt;
        opt.rel_tol = rel_tol;
        opt.abs_tol = rel_tol * 1e-2;
        opt.h_init = 1e-4;

        auto project = [&](double rv, double& rd) {
            const double F = ax.beta0 * ax.beta0 + ax.alpha0 * ax.alpha0 * (1.0 - 1.0 / (rv * rv)) +
                             4.0 * lambda * ax.alpha0 * std::log(rv);
            // near the turning point the square root is ill-conditioned; skip
            if (F < 1e-2 * (ax.beta0 * ax.beta0 + ax.alpha0 * ax.alpha0)) return;
            const double proj = std::copysign(std::sqrt(F), rd == 0.0 ? 1.0 : rd);
            const double rel = std::abs(proj - rd) / std::max(1.0, std::abs(rd));
            if (rel > budget)
                throw convergence_error("evolve_gaussian: first-integral drift " +
                                        std::to_string(rel) + " exceeds corrector budget");
            if (rel > 0.0) {
                ax.corrections++;
                ax.max_correction = std::max(ax.max_correction, rel);
                rd = proj;
            }
        };

        for (double stop : stops) {
            if (stop <= t0) continue;
            // keep knots dense enough that Hermite queries stay on budget
            opt.h_max = 0.01 * std::max(stop / 3.16227766016837933, 1.0);
            auto knots = ode_integrate(rhs, t0, y, stop, opt);
            for (std::size_t i = 1; i < knots.size(); ++i) {
                double rv = knots[i].y[0];
                double rd = knots[i].y[1];
                if (rv < rmin * (1.0 - 1e-6))
                    throw convergence_error(
                        "evolve_gaussian: width fell below its invariant floor");
                const double d = ax.first_integral(rv, rd, lambda);
                if (std::abs(d) > 0.5 * budget * (1.0 + rd * rd)) project(rv, rd);
                ax.max_identity_defect = std::max(
                    ax.max_identity_defect, std::abs(knots[i].y[3] + std::log(rv)));
                ax.t.push_back(knots[i].t);
                ax.r.push_back(rv);
                ax.r_dot.push_back(rd);
                ax.reA.push_back(knots[i].y[2]);
                ax.imA_raw.push_back(knots[i].y[3]);
                ax.intImA.push_back(knots[i].y[4]);
            }
            y = {ax.r.back(), ax.r_dot.back(), ax.reA.back(), ax.imA_raw.back(),
                 ax.intImA.back()};
            project(y[0], y[1]);
            ax.r_dot.back() = y[1];
            t0 = stop;
            opt.h_init = std::max(1e-4, 1e-3 * t0);
        }
        traj.axes.push_back(std::move(ax));
    }
    return traj;
}

cplx reconstruct_a(double r, double r_dot, double alpha0) {
    if (!(r > 0.0)) throw validation_error("reconstruct_a: width must be positive");
    return cplx(alpha0 / (r * r), -r_dot / r);
}

WaveField gaussian_field(const GaussianTrajectory& traj, double t, const Grid& grid) {
    if (grid.d != traj.dim())
        throw validation_error("gaussian_field: grid dimension does not match data");
    const cplx bt = traj.b(t);
    std::vector<cplx> aj(traj.dim());
    for (int j = 0; j < traj.dim(); ++j) {
        aj[j] = traj.a(j, t);
        const double sigma = traj.axes[j].r_at(t) / std::sqrt(traj.axes[j].alpha0);
        const double need = std::abs(traj.init.x0[j]) + 6.0 * sigma;
        if (grid.L < need) {
            // measure how much mass the box actually captures before failing
            double exact = std::norm(bt);
            for (int m = 0; m < traj.dim(); ++m) exact *= std::sqrt(kPi / aj[m].real());
            throw resolution_error(
                "gaussian_field: box half-width " + fmt_g6(grid.L) +
                    " below six-sigma support " + fmt_g6(need) + " on axis " + std::to_string(j),
                exact);
        }
    }

    // separable evaluation: one complex 1-D profile per axis
    std::vector<std::vector<cplx>> prof(traj.dim());
    for (int j = 0; j < traj.dim(); ++j) {
        prof[j].resize(grid.n);
        for (int i = 0; i < grid.n; ++i) {
            const double dx = grid.coord(i) - traj.init.x0[j];
            prof[j][i] = std::exp(-0.5 * aj[j] * dx * dx);
        }
    }

    WaveField u(grid);
    u.t = t;
    int idx[3];
    for (std::size_t i = 0; i < u.size(); ++i) {
        unravel(grid, i, idx);
        cplx v = bt;
        for (int j = 0; j < traj.dim(); ++j) v *= prof[j][idx[j]];
        u[i] = v;
    }
    return u;
}

double gaussian_lp_norm(const GaussianTrajectory& traj, double t, double p) {
    if (!(p >= 1.0)) throw validation_error("gaussian_lp_norm: p must lie in [1, inf]");
    const double babs = std::abs(traj.b(t));
    if (std::isinf(p)) return babs;
    double denom = 1.0;
    for (int j = 0; j < traj.dim(); ++j) denom *= std::pow(traj.a(j, t).real(), 1.0 / (2.0 * p));
    return std::pow(2.0 * kPi / p, traj.dim() / (2.0 * p)) * babs / denom;
}

double r_asymptotic(double t, double lambda, double alpha0) {
    if (!(lambda > 0.0) || !(alpha0 > 0.0))
        throw validation_error("r_asymptotic: lambda and alpha0 must be positive");
    if (!(t > kE)) throw validation_error("r_asymptotic: defined only for t > e");
    return 2.0 * t * std::sqrt(lambda * alpha0 * std::log(t));
}

double gaussian_mass(const GaussianTrajectory& traj, double t) {
    double m = std::norm(traj.b(t));
    for (int j = 0; j < traj.dim(); ++j) m *= std::sqrt(kPi / traj.a(j, t).real());
    return m;
}

double gaussian_grad_sq(const GaussianTrajectory& traj, double t) {
    const double b2 = std::norm(traj.b(t));
    double root = 1.0, sum = 0.0;
    for (int j = 0; j < traj.dim(); ++j) {
        const cplx aj = traj.a(j, t);
        root *= std::sqrt(aj.real());
        sum += std::norm(aj) / aj.real();
    }
    return 0.5 * std::pow(kPi, traj.dim() / 2.0) * b2 / root * sum;
}

double gaussian_hs_norm(const GaussianTrajectory& traj, double t, double s) {
    if (traj.dim() != 1)
        throw validation_error("gaussian_hs_norm: closed form available in one dimension only");
    if (!(s > 0.0 && s <= 1.0)) throw validation_error("gaussian_hs_norm: s must lie in (0, 1]");
    const cplx aj = traj.a(0, t);
    const double c = aj.real() / std::norm(aj);
    const double sq = std::norm(traj.b(t)) / std::abs(aj) * std::tgamma(s + 0.5) *
                      std::pow(c, -(s + 0.5));
    return std::sqrt(sq);
}

double gaussian_energy(const GaussianTrajectory& traj, double t) {
    const double mass = gaussian_mass(traj, t);
    const double ent = mass * (std::log(std::norm(traj.b(t))) - 0.5 * traj.dim());
    return 0.5 * gaussian_grad_sq(traj, t) + traj.lambda * ent;
}

} // namespace lognls::gaussian
