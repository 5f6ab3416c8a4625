#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "lognls/dispersion.hpp"
#include "lognls/fft.hpp"
#include "lognls/grid.hpp"
#include "lognls/solver.hpp"

namespace lognls::rescale {

/// L2 norm and squared L2 mass of the limit profile gamma(y) = exp(-|y|^2/2).
double gamma_norm(int d); // pi^{d/4}
double gamma_mass(int d); // pi^{d/2}

/// gamma^2 = exp(-|y|^2) sampled on a grid.
DensityProfile limit_profile(const Grid& g);

/// rho = |v|^2.
DensityProfile density_of(const WaveField& v);

/// Change of variables to the rescaled profile
///     v(t, y) = tau^{d/2} (||gamma|| / u0_norm) u(t, tau*y) exp(-i tau' tau |y|^2 / 2)
/// on the y-grid obtained by dividing the x-grid by tau(t); exact up to the
/// stored samples (no interpolation). ||v|| = ||gamma|| whenever
/// ||u|| = u0_norm, by construction.
WaveField to_v(const WaveField& u, const dispersion::TauTrajectory& traj, double u0_norm);

struct Moments {
    double m0 = 0.0;
    std::array<double, 3> m1{0.0, 0.0, 0.0};
    double m2 = 0.0;
};
/// (integral rho, integral y rho, integral |y|^2 rho).
Moments moments(const DensityProfile& rho);

/// Relative entropy against the limit profile: integral rho ln(rho/gamma^2),
/// with 0 ln 0 = 0 and the integrand zeroed below rho = 1e-300. Requires
/// mass(rho) = pi^{d/2} within 1e-6 relative.
double relative_entropy(const DensityProfile& rho);

/// Csiszar-Kullback lower bound ||rho - gamma^2||_{L1}^2 / (2 pi^{d/2}).
double ck_lower_bound(const DensityProfile& rho);

struct PseudoEnergy {
    double e_kin = 0.0; // ||grad_y v||^2 / (2 tau^2)
    double e_ent = 0.0; // relative entropy of |v|^2
    double total = 0.0; // e_kin + lambda*e_ent (+ power term when mu > 0)
};
/// Pseudo-energy of the rescaled profile; the power term is
/// mu_tilde / ((sigma+1) tau^{d sigma}) * integral |v|^{2 sigma + 2} with
/// mu_tilde = (u0_norm/||gamma||)^{2 sigma} mu, so u0_norm is required when
/// mu > 0.
PseudoEnergy pseudo_energy(const Fft& fft, const WaveField& v,
                           const dispersion::TauTrajectory& traj,
                           const pde::ModelParams& params, double u0_norm = 0.0);

struct MomentumPair {
    std::array<double, 3> i1{0.0, 0.0, 0.0}; // Im integral conj(v) grad v
    std::array<double, 3> i2{0.0, 0.0, 0.0}; // integral y |v|^2
};
MomentumPair momentum_pair(const Fft& fft, const WaveField& v);

/// Quadratic Wasserstein distance of two d=1 profiles of equal mass
/// (normalized to probabilities internally), by quantile coupling:
/// W2^2 = integral_0^1 (F1^{-1} - F2^{-1})^2 dq with piecewise-linear CDFs.
double wasserstein2_1d(const DensityProfile& rho1, const DensityProfile& rho2);

/// Homogeneous Sobolev norm (sum |k|^{2s} |u_hat|^2 weight)^{1/2}, s in (0,1].
double sobolev_norm(const Fft& fft, const WaveField& u, double s);

/// A-priori functional integral (1 + |y|^2 + |ln rho|) rho dy + E_kin;
/// bounded uniformly in time along the rescaled flow.
double apriori_functional(const Fft& fft, const WaveField& v,
                          const dispersion::TauTrajectory& traj);

struct DiagnosticsRecord {
    double t = 0.0;
    double s = 0.0; // slow time 0.5*ln tau'; NaN where tau' <= 0
    double e_kin = 0.0, e_ent = 0.0, pseudo_e = 0.0;
    double m0 = 0.0, m2 = 0.0;
    std::array<double, 3> m1{0.0, 0.0, 0.0};
    std::array<double, 3> i1{0.0, 0.0, 0.0};
    std::array<double, 3> i2{0.0, 0.0, 0.0};
    std::optional<double> w2;                      // d = 1 only
    std::vector<std::pair<double, double>> sobolev; // exponent -> value
    // invariants of the physical field u, filled by the caller (NaN = unset)
    double mass, energy;
    std::array<double, 3> momentum;

    DiagnosticsRecord();
};

/// Evaluate every rescaled-profile diagnostic at v.t. W2 is filled in d=1.
DiagnosticsRecord diagnose(const Fft& fft, const WaveField& v,
                           const dispersion::TauTrajectory& traj,
                           const pde::ModelParams& params, double u0_norm,
                           const std::vector<double>& sobolev_exponents = {0.25, 0.5, 0.75});

/// CSV with a fixed column order:
/// t,s,E_kin,E_ent,pseudo_E,m0,m1_*,m2,I1_*,I2_*,W2,Hs_*,mass,momentum_*,energy
/// (starred groups have one column per axis / exponent; W2 is empty for d > 1).
/// All records must share the same sobolev exponents.
void write_csv(const std::vector<DiagnosticsRecord>& records, int d, std::ostream& os);

} // namespace lognls::rescale
