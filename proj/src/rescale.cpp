#include "lognls/rescale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "lognls/errors.hpp"
#include "lognls/format.hpp"

namespace lognls::rescale {

namespace {
constexpr double kPi = 3.14159265358979323846;

// piecewise-linear CDF of a 1-d profile over cell edges, normalized to 1
struct QuantileTable {
    std::vector<double> edge; // n+1 cell edges
    std::vector<double> cdf;  // running mass, cdf[0] = 0, cdf[n] = 1

    explicit QuantileTable(const DensityProfile& rho) {
        const Grid& g = rho.grid;
        const double h = g.h();
        edge.resize(g.n + 1);
        cdf.resize(g.n + 1);
        edge[0] = g.coord(0) - 0.5 * h;
        cdf[0] = 0.0;
        for (int j = 0; j < g.n; ++j) {
            if (rho[j] < 0.0)
                throw validation_error("wasserstein2_1d: negative density value");
            edge[j + 1] = edge[j] + h;
            cdf[j + 1] = cdf[j] + rho[j] * h;
        }
        const double total = cdf.back();
        if (!(total > 0.0))
            throw validation_error("wasserstein2_1d: profile has no mass");
        for (double& c : cdf) c /= total;
        cdf.back() = 1.0;
    }

    double quantile(double q) const {
        auto it = std::upper_bound(cdf.begin(), cdf.end(), q);
        std::size_t j = static_cast<std::size_t>(it - cdf.begin());
        if (j == 0) return edge.front();
        if (j >= cdf.size()) return edge.back();
        --j;
        const double dq = cdf[j + 1] - cdf[j];
        if (dq <= 0.0) return edge[j + 1];
        return edge[j] + (q - cdf[j]) / dq * (edge[j + 1] - edge[j]);
    }
};
} // namespace

double gamma_norm(int d) { return std::pow(kPi, 0.25 * d); }
double gamma_mass(int d) { return std::pow(kPi, 0.5 * d); }

DensityProfile limit_profile(const Grid& g) {
    DensityProfile rho(g);
    int idx[3];
    for (std::size_t i = 0; i < rho.size(); ++i) {
        unravel(g, i, idx);
        double y2 = 0.0;
        for (int ax = 0; ax < g.d; ++ax) y2 += g.coord(idx[ax]) * g.coord(idx[ax]);
        rho[i] = std::exp(-y2);
    }
    return rho;
}

DensityProfile density_of(const WaveField& v) {
    DensityProfile rho(v.grid);
    for (std::size_t i = 0; i < v.size(); ++i) rho[i] = std::norm(v[i]);
    return rho;
}

WaveField to_v(const WaveField& u, const dispersion::TauTrajectory& traj, double u0_norm) {
    if (!(u0_norm > 0.0)) throw validation_error("to_v: u0_norm must be positive");
    if (u.t < 0.0 || u.t > traj.t_end())
        throw validation_error("to_v: field time " + fmt_g6(u.t) +
                               " outside the dilation trajectory range");
    const double tau = traj.tau_at(u.t);
    const double tau_dot = traj.tau_dot_at(u.t);
    const Grid& gx = u.grid;

    // y-grid = x-grid / tau; refuse when v would be undersampled
    const double pts_per_unit = tau / gx.h();
    if (pts_per_unit < 8.0)
        throw resolution_error("to_v: y-grid resolves only " + fmt_g6(pts_per_unit) +
                                   " points per unit length (< 8)",
                               pts_per_unit);
    Grid gy(gx.d, gx.n, gx.L / tau);

    WaveField v(gy);
    v.t = u.t;
    const double amp = std::pow(tau, 0.5 * gx.d) * gamma_norm(gx.d) / u0_norm;
    int idx[3];
    for (std::size_t i = 0; i < v.size(); ++i) {
        unravel(gy, i, idx);
        double y2 = 0.0;
        for (int ax = 0; ax < gx.d; ++ax) y2 += gy.coord(idx[ax]) * gy.coord(idx[ax]);
        v[i] = amp * u[i] * std::polar(1.0, -0.5 * tau_dot * tau * y2);
    }
    return v;
}

Moments moments(const DensityProfile& rho) {
    const Grid& g = rho.grid;
    Moments m;
    int idx[3];
    for (std::size_t i = 0; i < rho.size(); ++i) {
        unravel(g, i, idx);
        const double r = rho[i];
        m.m0 += r;
        double y2 = 0.0;
        for (int ax = 0; ax < g.d; ++ax) {
            const double y = g.coord(idx[ax]);
            m.m1[ax] += y * r;
            y2 += y * y;
        }
        m.m2 += y2 * r;
    }
    const double cell = g.cell();
    m.m0 *= cell;
    m.m2 *= cell;
    for (int ax = 0; ax < g.d; ++ax) m.m1[ax] *= cell;
    return m;
}

double relative_entropy(const DensityProfile& rho) {
    const Grid& g = rho.grid;
    const double target = gamma_mass(g.d);
    const double m = rho.mass();
    if (std::abs(m - target) > 1e-6 * target)
        throw validation_error("relative_entropy: profile mass " + fmt_g6(m) +
                               " does not match the limit-profile mass " + fmt_g6(target));
    double s = 0.0;
    int idx[3];
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double r = rho[i];
        if (r < 1e-300) continue; // 0 ln 0 = 0
        unravel(g, i, idx);
        double y2 = 0.0;
        for (int ax = 0; ax < g.d; ++ax) y2 += g.coord(idx[ax]) * g.coord(idx[ax]);
        s += r * (std::log(r) + y2); // ln(rho/gamma^2) = ln rho + |y|^2
    }
    return s * g.cell();
}

double ck_lower_bound(const DensityProfile& rho) {
    const DensityProfile ref = limit_profile(rho.grid);
    double l1 = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) l1 += std::abs(rho[i] - ref[i]);
    l1 *= rho.grid.cell();
    return l1 * l1 / (2.0 * gamma_mass(rho.grid.d));
}

PseudoEnergy pseudo_energy(const Fft& fft, const WaveField& v,
                           const dispersion::TauTrajectory& traj,
                           const pde::ModelParams& params, double u0_norm) {
    if (fft.grid() != v.grid) throw validation_error("pseudo_energy: fft/grid mismatch");
    const double tau = traj.tau_at(v.t);
    const Grid& g = v.grid;

    double grad_sq = 0.0;
    {
        WaveField hat = v;
        fft.forward(hat.data.data());
        const double w = g.cell() / static_cast<double>(g.size());
        int idx[3];
        for (std::size_t i = 0; i < hat.size(); ++i) {
            unravel(g, i, idx);
            double k2 = 0.0;
            for (int ax = 0; ax < g.d; ++ax) {
                const double k = g.wavenumber(idx[ax]);
                k2 += k * k;
            }
            grad_sq += k2 * std::norm(hat[i]);
        }
        grad_sq *= w;
    }

    PseudoEnergy pe;
    pe.e_kin = grad_sq / (2.0 * tau * tau);
    pe.e_ent = relative_entropy(density_of(v));
    pe.total = pe.e_kin + params.lambda * pe.e_ent;
    if (params.mu > 0.0) {
        if (!(u0_norm > 0.0))
            throw validation_error("pseudo_energy: u0_norm required when mu > 0");
        const double mu_t = params.mu * std::pow(u0_norm / gamma_norm(g.d), 2.0 * params.sigma);
        double pw = 0.0;
        for (const auto& z : v.data) pw += std::pow(std::norm(z), params.sigma + 1.0);
        pw *= g.cell();
        pe.total += mu_t / ((params.sigma + 1.0) * std::pow(tau, g.d * params.sigma)) * pw;
    }
    return pe;
}

MomentumPair momentum_pair(const Fft& fft, const WaveField& v) {
    MomentumPair mp;
    mp.i1 = pde::momentum(fft, v);
    mp.i2 = moments(density_of(v)).m1;
    return mp;
}

double wasserstein2_1d(const DensityProfile& rho1, const DensityProfile& rho2) {
    if (rho1.grid.d != 1 || rho2.grid.d != 1)
        throw validation_error("wasserstein2_1d: only d = 1 is supported");
    const double m1 = rho1.mass(), m2 = rho2.mass();
    if (std::abs(m1 - m2) > 1e-6 * std::max(m1, m2))
        throw validation_error("wasserstein2_1d: profile masses differ: " + fmt_g6(m1) +
                               " vs " + fmt_g6(m2));

    QuantileTable q1(rho1), q2(rho2);
    std::vector<double> brk;
    brk.reserve(q1.cdf.size() + q2.cdf.size());
    brk.insert(brk.end(), q1.cdf.begin(), q1.cdf.end());
    brk.insert(brk.end(), q2.cdf.begin(), q2.cdf.end());
    std::sort(brk.begin(), brk.end());
    brk.erase(std::unique(brk.begin(), brk.end()), brk.end());

    // both inverses are linear between breakpoints, so Simpson is exact
    double w2sq = 0.0;
    auto f = [&](double q) {
        const double diff = q1.quantile(q) - q2.quantile(q);
        return diff * diff;
    };
    for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
        const double a = brk[i], b = brk[i + 1];
        if (b <= a) continue;
        w2sq += (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
    }
    return std::sqrt(w2sq);
}

double sobolev_norm(const Fft& fft, const WaveField& u, double s) {
    if (!(s > 0.0 && s <= 1.0))
        throw validation_error("sobolev_norm: exponent must lie in (0, 1]");
    if (fft.grid() != u.grid) throw validation_error("sobolev_norm: fft/grid mismatch");
    const Grid& g = u.grid;
    WaveField hat = u;
    fft.forward(hat.data.data());
    const double w = g.cell() / static_cast<double>(g.size());
    double sum = 0.0;
    int idx[3];
    for (std::size_t i = 0; i < hat.size(); ++i) {
        unravel(g, i, idx);
        double k2 = 0.0;
        for (int ax = 0; ax < g.d; ++ax) {
            const double k = g.wavenumber(idx[ax]);
            k2 += k * k;
        }
        if (k2 > 0.0) sum += std::pow(k2, s) * std::norm(hat[i]);
    }
    return std::sqrt(sum * w);
}

double apriori_functional(const Fft& fft, const WaveField& v,
                          const dispersion::TauTrajectory& traj) {
    const Grid& g = v.grid;
    double s = 0.0;
    int idx[3];
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double r = std::norm(v[i]);
        if (r < 1e-300) continue;
        unravel(g, i, idx);
        double y2 = 0.0;
        for (int ax = 0; ax < g.d; ++ax) y2 += g.coord(idx[ax]) * g.coord(idx[ax]);
        s += (1.0 + y2 + std::abs(std::log(r))) * r;
    }
    pde::ModelParams p; // lambda irrelevant for e_kin
    return s * g.cell() + pseudo_energy(fft, v, traj, p).e_kin;
}

DiagnosticsRecord::DiagnosticsRecord()
    : mass(std::numeric_limits<double>::quiet_NaN()),
      energy(std::numeric_limits<double>::quiet_NaN()) {
    momentum.fill(std::numeric_limits<double>::quiet_NaN());
}

DiagnosticsRecord diagnose(const Fft& fft, const WaveField& v,
                           const dispersion::TauTrajectory& traj,
                           const pde::ModelParams& params, double u0_norm,
                           const std::vector<double>& sobolev_exponents) {
    DiagnosticsRecord rec;
    rec.t = v.t;
    const double tau_dot = traj.tau_dot_at(v.t);
    rec.s = tau_dot > 0.0 ? 0.5 * std::log(tau_dot)
                          : std::numeric_limits<double>::quiet_NaN();

    const DensityProfile rho = density_of(v);
    const Moments m = moments(rho);
    rec.m0 = m.m0;
    rec.m1 = m.m1;
    rec.m2 = m.m2;

    const PseudoEnergy pe = pseudo_energy(fft, v, traj, params, u0_norm);
    rec.e_kin = pe.e_kin;
    rec.e_ent = pe.e_ent;
    rec.pseudo_e = pe.total;

    const MomentumPair mp = momentum_pair(fft, v);
    rec.i1 = mp.i1;
    rec.i2 = mp.i2;

    if (v.grid.d == 1) rec.w2 = wasserstein2_1d(rho, limit_profile(v.grid));

    for (double s : sobolev_exponents) rec.sobolev.emplace_back(s, sobolev_norm(fft, v, s));
    return rec;
}

void write_csv(const std::vector<DiagnosticsRecord>& records, int d, std::ostream& os) {
    if (d < 1 || d > 3) throw validation_error("write_csv: dimension must be 1, 2 or 3");
    std::vector<double> exps;
    if (!records.empty())
        for (const auto& [e, val] : records.front().sobolev) exps.push_back(e);

    os << "t,s,E_kin,E_ent,pseudo_E,m0";
    for (int ax = 0; ax < d; ++ax) os << ",m1_" << ax;
    os << ",m2";
    for (int ax = 0; ax < d; ++ax) os << ",I1_" << ax;
    for (int ax = 0; ax < d; ++ax) os << ",I2_" << ax;
    os << ",W2";
    for (double e : exps) os << ",Hs_" << fmt_g6(e);
    os << ",mass";
    for (int ax = 0; ax < d; ++ax) os << ",momentum_" << ax;
    os << ",energy\n";

    for (const auto& r : records) {
        if (r.sobolev.size() != exps.size())
            throw validation_error("write_csv: records disagree on sobolev exponents");
        for (std::size_t i = 0; i < exps.size(); ++i)
            if (r.sobolev[i].first != exps[i])
                throw validation_error("write_csv: records disagree on sobolev exponents");
        os << fmt_g17(r.t) << ',' << fmt_g17(r.s) << ',' << fmt_g17(r.e_kin) << ','
           << fmt_g17(r.e_ent) << ',' << fmt_g17(r.pseudo_e) << ',' << fmt_g17(r.m0);
        for (int ax = 0; ax < d; ++ax) os << ',' << fmt_g17(r.m1[ax]);
        os << ',' << fmt_g17(r.m2);
        for (int ax = 0; ax < d; ++ax) os << ',' << fmt_g17(r.i1[ax]);
        for (int ax = 0; ax < d; ++ax) os << ',' << fmt_g17(r.i2[ax]);
        os << ',';
        if (r.w2) os << fmt_g17(*r.w2);
        for (const auto& [e, val] : r.sobolev) os << ',' << fmt_g17(val);
        os << ',' << fmt_g17(r.mass);
        for (int ax = 0; ax < d; ++ax) os << ',' << fmt_g17(r.momentum[ax]);
        os << ',' << fmt_g17(r.energy) << '\n';
    }
}

} // namespace lognls::rescale
