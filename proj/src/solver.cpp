#include "lognls/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lognls/errors.hpp"
#include "lognls/format.hpp"
#include "phase_kernel.hpp"

namespace lognls::pde {

namespace {

// exp(-i * c * |k|^2) sampled over the full rank-d frequency lattice
std::vector<cplx> kinetic_multiplier(const Grid& g, double c) {
    std::vector<double> k1(g.n);
    for (int j = 0; j < g.n; ++j) k1[j] = g.wavenumber(j);
    std::vector<cplx> mult(g.size());
    int idx[3];
    for (std::size_t i = 0; i < mult.size(); ++i) {
        unravel(g, i, idx);
        double k2 = 0.0;
        for (int ax = 0; ax < g.d; ++ax) k2 += k1[idx[ax]] * k1[idx[ax]];
        mult[i] = std::polar(1.0, -c * k2);
    }
    return mult;
}

void apply_nonlinear_phase(WaveField& u, double dt, const ModelParams& p) {
    const bool cubic = p.mu > 0.0 && p.sigma == 1.0;
    for (auto& z : u.data) {
        const double rho = std::norm(z);
        double phase = p.lambda * std::log(p.epsilon + rho);
        if (p.mu > 0.0) phase += p.mu * (cubic ? rho : std::pow(rho, p.sigma));
        z *= std::polar(1.0, -dt * phase);
    }
}

void check_finite(const WaveField& u, double t, long step, double cap) {
    double mx = 0.0;
    for (const auto& z : u.data) {
        const double r = std::norm(z);
        if (!std::isfinite(r) || r > cap) {
            throw blowup_error("solver: non-finite or runaway field (|u|^2 = " + fmt_g6(r) +
                                   ") at t = " + fmt_g6(t),
                               t, step);
        }
        mx = std::max(mx, r);
    }
    (void)mx;
}

} // namespace

void ModelParams::validate(int d) const {
    if (lambda == 0.0 || !std::isfinite(lambda))
        throw validation_error("model: lambda must be a nonzero finite real");
    if (!(mu >= 0.0)) throw validation_error("model: mu must be nonnegative");
    if (mu > 0.0) {
        if (!(sigma > 0.0)) throw validation_error("model: sigma must be positive when mu > 0");
        if (d >= 3 && !(sigma < 2.0 / (d - 2)))
            throw validation_error("model: sigma must be below 2/(d-2) in dimension " +
                                   std::to_string(d));
    }
    if (!(epsilon > 0.0 && epsilon <= 1e-2))
        throw validation_error("model: epsilon must lie in (0, 1e-2]");
}

void step_strang(const Fft& fft, WaveField& u, double dt, const ModelParams& p) {
    p.validate(u.grid.d);
    if (fft.grid() != u.grid) throw validation_error("step_strang: fft/grid mismatch");
    const auto half = kinetic_multiplier(u.grid, dt / 4.0);
    fft.forward(u.data.data());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= half[i];
    fft.inverse(u.data.data());
    apply_nonlinear_phase(u, dt, p);
    fft.forward(u.data.data());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= half[i];
    fft.inverse(u.data.data());
    u.t += dt;
    check_finite(u, 0.0, -1, std::numeric_limits<double>::infinity());
}

double mass(const WaveField& u) {
    double s = 0.0;
    for (const auto& z : u.data) s += std::norm(z);
    return s * u.grid.cell();
}

std::array<double, 3> momentum(const Fft& fft, const WaveField& u) {
    WaveField hat = u;
    fft.forward(hat.data.data());
    const Grid& g = u.grid;
    const double w = g.cell() / static_cast<double>(g.size());
    std::array<double, 3> J{0.0, 0.0, 0.0};
    int idx[3];
    for (std::size_t i = 0; i < hat.size(); ++i) {
        unravel(g, i, idx);
        const double a2 = std::norm(hat[i]);
        for (int ax = 0; ax < g.d; ++ax) {
            // odd multiplier: drop the unpaired Nyquist mode
            if (idx[ax] == g.n / 2) continue;
            J[ax] += g.wavenumber(idx[ax]) * a2;
        }
    }
    for (int ax = 0; ax < g.d; ++ax) J[ax] *= w;
    return J;
}

Observables observables(const Fft& fft, const WaveField& u, const ModelParams& p) {
    Observables out;
    const Grid& g = u.grid;

    double grad_sq = 0.0;
    {
        WaveField hat = u;
        fft.forward(hat.data.data());
        const double w = g.cell() / static_cast<double>(g.size());
        int idx[3];
        for (std::size_t i = 0; i < hat.size(); ++i) {
            unravel(g, i, idx);
            const double a2 = std::norm(hat[i]);
            double k2 = 0.0;
            for (int ax = 0; ax < g.d; ++ax) {
                const double k = g.wavenumber(idx[ax]);
                k2 += k * k;
            }
            grad_sq += k2 * a2;
            for (int ax = 0; ax < g.d; ++ax) {
                if (idx[ax] == g.n / 2) continue;
                out.momentum[ax] += g.wavenumber(idx[ax]) * a2;
            }
        }
        grad_sq *= w;
        for (int ax = 0; ax < g.d; ++ax) out.momentum[ax] *= w;
    }

    double ent = 0.0, ent_reg = 0.0, power = 0.0, m = 0.0;
    const double eps = p.epsilon;
    const double eps_ln_eps = eps * std::log(eps);
    for (const auto& z : u.data) {
        const double rho = std::norm(z);
        m += rho;
        if (rho > 0.0) ent += rho * std::log(rho);
        ent_reg += (eps + rho) * std::log(eps + rho) - rho - eps_ln_eps;
        if (p.mu > 0.0) power += std::pow(rho, p.sigma + 1.0);
    }
    const double cell = g.cell();
    out.mass = m * cell;
    const double power_term = p.mu > 0.0 ? p.mu / (p.sigma + 1.0) * power * cell : 0.0;
    out.energy = 0.5 * grad_sq + p.lambda * ent * cell + power_term;
    out.energy_reg = 0.5 * grad_sq + p.lambda * ent_reg * cell + power_term;
    return out;
}

double shell_mass_fraction(const WaveField& u, double frac) {
    const Grid& g = u.grid;
    const double cut = (1.0 - frac) * g.L;
    double shell = 0.0, total = 0.0;
    int idx[3];
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double rho = std::norm(u[i]);
        total += rho;
        unravel(g, i, idx);
        for (int ax = 0; ax < g.d; ++ax) {
            if (std::abs(g.coord(idx[ax])) >= cut) {
                shell += rho;
                break;
            }
        }
    }
    return total > 0.0 ? shell / total : 0.0;
}

std::vector<DiagRow> run(const Fft& fft, WaveField& u, const ModelParams& p,
                         const RunSchedule& sched, const SnapshotFn& on_snapshot) {
    p.validate(u.grid.d);
    if (fft.grid() != u.grid) throw validation_error("run: fft/grid mismatch");
    if (!(sched.dt > 0.0)) throw validation_error("run: dt must be positive");
    if (!(sched.t_end >= sched.t_start))
        throw validation_error("run: t_end must be >= t_start");

    const double span = sched.t_end - sched.t_start;
    const long nsteps =
        span > 0.0 ? static_cast<long>(std::ceil(span / sched.dt * (1.0 - 1e-12))) : 0;

    // snapshot times snapped onto the step grid
    if (!std::is_sorted(sched.snapshots.begin(), sched.snapshots.end()))
        throw validation_error("run: snapshot times must be sorted");
    std::vector<long> snap_steps;
    for (double ts : sched.snapshots) {
        if (ts < sched.t_start - 1e-9 || ts > sched.t_end + 1e-9)
            throw validation_error("run: snapshot time outside [t_start, t_end]");
        long k = std::lround((ts - sched.t_start) / sched.dt);
        snap_steps.push_back(std::clamp(k, 0L, nsteps));
    }
    std::sort(snap_steps.begin(), snap_steps.end());
    snap_steps.erase(std::unique(snap_steps.begin(), snap_steps.end()), snap_steps.end());

    std::vector<DiagRow> rows;
    const double m0 = mass(u);
    const double cap = 1e12 * std::max(1e-300, m0 / u.grid.cell()); // runaway guard

    auto emit = [&](double t) {
        u.t = t;
        check_finite(u, t, -1, cap);
        if (sched.shell_monitor) {
            const double sf = shell_mass_fraction(u, sched.shell_frac);
            if (sf > sched.shell_tol)
                throw resolution_error(
                    "run: boundary-shell mass fraction " + fmt_g6(sf) +
                        " exceeds budget " + fmt_g6(sched.shell_tol) + " at t = " + fmt_g6(t),
                    sf);
        }
        rows.push_back({t, observables(fft, u, p)});
        if (on_snapshot) on_snapshot(t, u);
    };

    emit(sched.t_start);
    if (nsteps == 0) return rows;

    auto mul = [&u](const std::vector<cplx>& m) {
        for (std::size_t i = 0; i < u.size(); ++i) u[i] *= m[i];
    };

    const auto half = kinetic_multiplier(u.grid, sched.dt / 4.0);
    const auto full = kinetic_multiplier(u.grid, sched.dt / 2.0);
    const double last_dt = span - (nsteps - 1) * sched.dt;

    std::size_t next_snap = 0;
    while (next_snap < snap_steps.size() && snap_steps[next_snap] == 0) ++next_snap;

    // steps 0 .. nsteps-2 march with exactly dt; the final (possibly shorter)
    // step is handled standalone afterwards
    const long nreg = nsteps - 1;
    if (nreg > 0) {
        fft.forward(u.data.data());
        mul(half); // open step 0
        for (long k = 0; k < nreg; ++k) {
            fft.inverse(u.data.data());
            apply_nonlinear_phase(u, sched.dt, p);
            fft.forward(u.data.data());
            const bool boundary =
                next_snap < snap_steps.size() && snap_steps[next_snap] == k + 1;
            const bool last_reg = (k == nreg - 1);
            if (boundary || last_reg) {
                mul(half); // close step k
                fft.inverse(u.data.data());
                if (boundary) {
                    emit(sched.t_start + (k + 1) * sched.dt);
                    while (next_snap < snap_steps.size() && snap_steps[next_snap] <= k + 1)
                        ++next_snap;
                }
                if (!last_reg) {
                    fft.forward(u.data.data());
                    mul(half); // reopen step k+1
                }
            } else {
                mul(full); // trailing half of k merged with leading half of k+1
            }
        }
    }

    // final step, landing exactly on t_end
    {
        const bool regular = std::abs(last_dt - sched.dt) < 1e-9 * sched.dt;
        const auto m = regular ? half : kinetic_multiplier(u.grid, last_dt / 4.0);
        fft.forward(u.data.data());
        mul(m);
        fft.inverse(u.data.data());
        apply_nonlinear_phase(u, last_dt, p);
        fft.forward(u.data.data());
        mul(m);
        fft.inverse(u.data.data());
    }
    emit(sched.t_end);
    return rows;
}

LogInequality log_inequality_check(cplx z1, cplx z2) {
    auto f = [](cplx z) {
        const double a = std::abs(z);
        return a == 0.0 ? cplx(0.0, 0.0) : z * (2.0 * std::log(a));
    };
    const cplx dz = z2 - z1;
    const double lhs = std::abs(std::imag((f(z2) - f(z1)) * std::conj(dz)));
    const double rhs = 4.0 * std::norm(dz);
    return {lhs, rhs, lhs <= rhs};
}

} // namespace lognls::pde
