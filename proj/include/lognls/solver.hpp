#pragma once

#include <array>
#include <functional>
#include <vector>

#include "lognls/fft.hpp"
#include "lognls/grid.hpp"

namespace lognls::pde {

/// Model i u_t + (1/2) Lap u = lambda ln(eps + |u|^2) u + mu |u|^{2 sigma} u.
struct ModelParams {
    double lambda = 1.0;  // nonzero; negative selects the focusing branch
    double mu = 0.0;      // power-nonlinearity strength, >= 0
    double sigma = 1.0;   // power exponent, consulted only when mu > 0
    double epsilon = 1e-12; // log regularization, in (0, 1e-2]

    void validate(int d) const;
};

struct Observables {
    double mass = 0.0;
    std::array<double, 3> momentum{0.0, 0.0, 0.0};
    double energy = 0.0;     // entropy term uses the bare rho*ln(rho)
    double energy_reg = 0.0; // entropy term uses the regularized antiderivative
};

/// One Strang step: half free flow, exact nonlinear phase rotation, half
/// free flow. The free half steps multiply by exp(-i dt |k|^2 / 4) in
/// Fourier space; the nonlinear factor is exp(-i dt (lambda ln(eps+rho) + mu rho^sigma)).
void step_strang(const Fft& fft, WaveField& u, double dt, const ModelParams& p);

double mass(const WaveField& u);
std::array<double, 3> momentum(const Fft& fft, const WaveField& u);
Observables observables(const Fft& fft, const WaveField& u, const ModelParams& p);

struct RunSchedule {
    double dt = 1e-3;
    double t_start = 0.0;
    double t_end = 1.0;
    /// Requested snapshot times; snapped to the nearest step boundary.
    std::vector<double> snapshots;
    bool shell_monitor = true;
    double shell_frac = 0.05; // outer fraction of the box watched for leakage
    double shell_tol = 1e-6;  // abort when shell mass exceeds tol * initial mass
};

struct DiagRow {
    double t;
    Observables obs;
};

using SnapshotFn = std::function<void(double t, const WaveField& u)>;

/// March u from t_start to t_end with fixed dt (final step may be shorter to
/// land exactly on t_end). Emits diagnostics and snapshot callbacks at the
/// snapped snapshot times plus both endpoints. Consecutive free half-steps
/// between outputs are merged into full-step multipliers.
std::vector<DiagRow> run(const Fft& fft, WaveField& u, const ModelParams& p,
                         const RunSchedule& sched, const SnapshotFn& on_snapshot = {});

/// Mass fraction in the outer shell of the box (per-axis outer `frac`).
double shell_mass_fraction(const WaveField& u, double frac);

struct LogInequality {
    double lhs;
    double rhs;
    bool ok;
};

/// Pointwise bound behind L^2 stability of the log nonlinearity:
/// |Im((z2 ln|z2|^2 - z1 ln|z1|^2) conj(z2 - z1))| <= 4 |z2 - z1|^2.
LogInequality log_inequality_check(cplx z1, cplx z2);

} // namespace lognls::pde
