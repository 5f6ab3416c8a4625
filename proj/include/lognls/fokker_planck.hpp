#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lognls/dispersion.hpp"
#include "lognls/fft.hpp"
#include "lognls/grid.hpp"

namespace lognls::fp {

/// Hydrodynamic variables of a rescaled profile: rho = |v|^2 and the
/// current J = Im(conj(v) grad v), one component per axis.
struct HydroFields {
    DensityProfile rho;
    std::vector<std::vector<double>> J;
    double t = 0.0;
    double s = 0.0;
};

HydroFields hydro_fields(const Fft& fft, const WaveField& v);

/// Max-norm residual of the continuity relation
///     d/dt rho + (1/tau^2) div J = 0
/// from two snapshots on a common grid: centered difference in t against the
/// averaged current, with tau evaluated at the midpoint. Second-order small
/// in the snapshot spacing along an exact solution.
double continuity_residual(const Fft& fft, const HydroFields& a, const HydroFields& b,
                           double tau_mid);

/// Drift-diffusion generator L rho = Laplacian(rho) + div(2 y rho), evaluated
/// spectrally in the product-rule form 2*d*rho + 2 y . grad rho + Laplacian(rho)
/// (the coordinate factor y never gets differentiated, so the box boundary
/// does not ring). Annihilates exp(-|y|^2).
std::vector<double> apply_L(const Fft& fft, const DensityProfile& rho);

/// Exact Ornstein-Uhlenbeck evolution of the law by s_end in slow time:
/// the solution of d rho/ds = L rho is the law of e^{-2s} Y0 + G with
/// Y0 ~ rho0/mass and G centered Gaussian of per-axis variance (1-e^{-4s})/2.
/// Implemented by evaluating the input's trigonometric interpolant at dilated
/// frequencies, applying the Gaussian factor, transforming back, clamping
/// ringing-level negatives, and restoring the input mass exactly.
DensityProfile fp_solve(const DensityProfile& rho0, double s_end);

/// One comparison row: rescaled-profile gaps to the limit at a given time.
struct FpRow {
    double s = 0.0;
    double t = 0.0;
    double m1_gap = 0.0;        // |first moment|
    double m2_gap = 0.0;        // |second moment - d/2 * pi^{d/2}|
    std::optional<double> w2;   // d = 1 only
    std::vector<double> proxies; // <rho - gamma^2, phi> per dictionary entry
};

/// Weak-convergence report against a fixed, versioned dictionary of test
/// functions (Gaussian-weighted polynomials and a smoothed box).
struct FpReport {
    int version = 1;
    std::vector<std::string> dictionary;
    std::vector<FpRow> rows;
};

/// Names of the version-1 test functions.
std::vector<std::string> fp_dictionary();

/// Rescale each physical snapshot (which must carry its time stamp) and
/// measure its distance to the limit profile. Snapshots must span at least
/// one unit of slow time.
FpReport fp_compare(const std::vector<WaveField>& snapshots,
                    const dispersion::TauTrajectory& traj, double u0_norm);

std::string fp_report_json(const FpReport& report);
FpReport fp_report_parse(const std::string& text);

} // namespace lognls::fp
