#include "lognls/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>

#include <json.hpp>

#include "lognls/errors.hpp"
#include "lognls/rescale.hpp"

namespace lognls::fp {
namespace {

std::size_t axis_stride(const Grid& g, int ax) {
    std::size_t s = 1;
    for (int a = g.d - 1; a > ax; --a) s *= static_cast<std::size_t>(g.n);
    return s;
}

/// Apply f(line) to every 1-d line of A along axis ax.
template <typename F>
void for_each_line(const Grid& g, int ax, std::vector<cplx>& A, F&& f) {
    const std::size_t n = static_cast<std::size_t>(g.n);
    const std::size_t stride = axis_stride(g, ax);
    const std::size_t total = g.size();
    std::vector<cplx> line(n);
    for (std::size_t base = 0; base < total; ++base) {
        if ((base / stride) % n != 0) continue; // not the first point of its line
        for (std::size_t m = 0; m < n; ++m) line[m] = A[base + m * stride];
        f(line);
        for (std::size_t m = 0; m < n; ++m) A[base + m * stride] = line[m];
    }
}

/// Semidiscrete transform of one line: F_j = sum_m f_m exp(-i c k_j y_m),
/// evaluating the trig interpolant's coefficients at the dilated frequencies.
void dilated_forward(const Grid& g, int ax, std::vector<cplx>& A, double c) {
    const int n = g.n;
    for_each_line(g, ax, A, [&](std::vector<cplx>& line) {
        std::vector<cplx> out(n);
        for (int j = 0; j < n; ++j) {
            const double kj = c * g.wavenumber(j);
            cplx w = std::polar(1.0, -kj * g.coord(0));
            const cplx step = std::polar(1.0, -kj * g.h());
            cplx acc(0.0, 0.0);
            for (int m = 0; m < n; ++m) {
                acc += line[m] * w;
                w *= step;
            }
            out[j] = acc;
        }
        line = out;
    });
}

/// Inverse of dilated_forward at c=1: f_m = (1/n) sum_j F_j exp(+i k_j y_m).
void lattice_inverse(const Grid& g, int ax, std::vector<cplx>& A) {
    const int n = g.n;
    for_each_line(g, ax, A, [&](std::vector<cplx>& line) {
        std::vector<cplx> out(n);
        for (int m = 0; m < n; ++m) {
            const double ym = g.coord(m);
            cplx w = std::polar(1.0, g.wavenumber(0) * ym);
            const cplx step = std::polar(1.0, (g.wavenumber(1) - g.wavenumber(0)) * ym);
            cplx acc(0.0, 0.0);
            for (int j = 0; j < n; ++j) {
                acc += line[j] * w;
                w *= step;
            }
            out[m] = acc / double(n);
        }
        line = out;
    });
}

double squared_wavenumber(const Grid& g, std::size_t idx) {
    int j[3];
    unravel(g, idx, j);
    double k2 = 0.0;
    for (int ax = 0; ax < g.d; ++ax) {
        const double k = g.wavenumber(j[ax]);
        k2 += k * k;
    }
    return k2;
}

double dict_value(int which, const Grid& g, std::size_t idx) {
    int j[3];
    unravel(g, idx, j);
    double r2 = 0.0;
    for (int ax = 0; ax < g.d; ++ax) {
        const double y = g.coord(j[ax]);
        r2 += y * y;
    }
    const double gauss = std::exp(-0.5 * r2);
    switch (which) {
        case 0: return gauss;
        case 1: return r2 * gauss;
        case 2: return g.coord(j[0]) * gauss;
        default: return 1.0 / (1.0 + std::exp(-4.0 * (1.0 - r2)));
    }
}

} // namespace

HydroFields hydro_fields(const Fft& fft, const WaveField& v) {
    const Grid& g = v.grid;
    if (!(fft.grid() == g)) throw validation_error("hydro_fields: fft plan is for another grid");

    HydroFields out;
    out.rho = DensityProfile(g);
    out.t = v.t;
    out.s = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < v.size(); ++i) out.rho[i] = std::norm(v[i]);

    std::vector<cplx> spec = v.data;
    fft.forward(spec.data());
    out.J.assign(g.d, std::vector<double>(g.size(), 0.0));
    std::vector<cplx> work(g.size());
    for (int ax = 0; ax < g.d; ++ax) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            int j[3];
            unravel(g, i, j);
            // drop the unpaired Nyquist mode in the odd (first-derivative) multiplier
            const double k = j[ax] == g.n / 2 ? 0.0 : g.wavenumber(j[ax]);
            work[i] = spec[i] * cplx(0.0, k);
        }
        fft.inverse(work.data());
        for (std::size_t i = 0; i < g.size(); ++i)
            out.J[ax][i] = std::imag(std::conj(v[i]) * work[i]);
    }
    return out;
}

double continuity_residual(const Fft& fft, const HydroFields& a, const HydroFields& b,
                           double tau_mid) {
    const Grid& g = a.rho.grid;
    if (!(g == b.rho.grid) || !(fft.grid() == g))
        throw validation_error("continuity_residual: snapshots live on different grids");
    if (!(b.t > a.t)) throw validation_error("continuity_residual: snapshots must be ordered in t");
    if (!(tau_mid > 0.0)) throw validation_error("continuity_residual: tau must be positive");

    const double dt = b.t - a.t;
    std::vector<double> div(g.size(), 0.0);
    std::vector<cplx> work(g.size());
    for (int ax = 0; ax < g.d; ++ax) {
        for (std::size_t i = 0; i < g.size(); ++i)
            work[i] = cplx(0.5 * (a.J[ax][i] + b.J[ax][i]), 0.0);
        fft.forward(work.data());
        for (std::size_t i = 0; i < g.size(); ++i) {
            int j[3];
            unravel(g, i, j);
            const double k = j[ax] == g.n / 2 ? 0.0 : g.wavenumber(j[ax]);
            work[i] *= cplx(0.0, k);
        }
        fft.inverse(work.data());
        for (std::size_t i = 0; i < g.size(); ++i) div[i] += std::real(work[i]);
    }

    double worst = 0.0;
    const double inv_tau2 = 1.0 / (tau_mid * tau_mid);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = (b.rho[i] - a.rho[i]) / dt + inv_tau2 * div[i];
        worst = std::max(worst, std::fabs(r));
    }
    return worst;
}

std::vector<double> apply_L(const Fft& fft, const DensityProfile& rho) {
    const Grid& g = rho.grid;
    if (!(fft.grid() == g)) throw validation_error("apply_L: fft plan is for another grid");

    std::vector<cplx> spec(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) spec[i] = cplx(rho[i], 0.0);
    fft.forward(spec.data());

    std::vector<double> out(g.size(), 0.0);
    std::vector<cplx> work(g.size());

    // Laplacian
    for (std::size_t i = 0; i < g.size(); ++i) work[i] = spec[i] * (-squared_wavenumber(g, i));
    fft.inverse(work.data());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = std::real(work[i]);

    // div(2 y rho) = 2 d rho + 2 y . grad rho
    for (std::size_t i = 0; i < g.size(); ++i) out[i] += 2.0 * g.d * rho[i];
    for (int ax = 0; ax < g.d; ++ax) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            int j[3];
            unravel(g, i, j);
            const double k = j[ax] == g.n / 2 ? 0.0 : g.wavenumber(j[ax]);
            work[i] = spec[i] * cplx(0.0, k);
        }
        fft.inverse(work.data());
        for (std::size_t i = 0; i < g.size(); ++i) {
            int j[3];
            unravel(g, i, j);
            out[i] += 2.0 * g.coord(j[ax]) * std::real(work[i]);
        }
    }
    return out;
}

DensityProfile fp_solve(const DensityProfile& rho0, double s_end) {
    const Grid& g = rho0.grid;
    if (!(s_end > 0.0)) throw validation_error("fp_solve: slow-time horizon must be positive");
    for (double r : rho0.data) {
        if (!std::isfinite(r)) throw validation_error("fp_solve: non-finite density value");
        if (r < -1e-12) throw validation_error("fp_solve: negative density value");
    }
    const double mass0 = rho0.mass();
    if (!(mass0 > 0.0)) throw validation_error("fp_solve: input has no mass");

    const double c = std::exp(-2.0 * s_end);        // contraction of the initial law
    const double var = 0.5 * (1.0 - c * c);         // per-axis variance of the Gaussian part

    std::vector<cplx> work(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) work[i] = cplx(std::max(rho0[i], 0.0), 0.0);

    for (int ax = 0; ax < g.d; ++ax) dilated_forward(g, ax, work, c);
    for (std::size_t i = 0; i < g.size(); ++i)
        work[i] *= std::exp(-0.5 * var * squared_wavenumber(g, i));
    for (int ax = 0; ax < g.d; ++ax) lattice_inverse(g, ax, work);

    DensityProfile out(g);
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = std::max(std::real(work[i]), 0.0);
    const double mass1 = out.mass();
    if (!(mass1 > 0.0)) throw numerical_error("fp_solve: evolution lost all mass");
    const double fix = mass0 / mass1;
    for (auto& r : out.data) r *= fix;
    return out;
}

std::vector<std::string> fp_dictionary() {
    return {"gauss", "r2_gauss", "y0_gauss", "smooth_box"};
}

FpReport fp_compare(const std::vector<WaveField>& snapshots,
                    const dispersion::TauTrajectory& traj, double u0_norm) {
    if (snapshots.size() < 2)
        throw validation_error("fp_compare: need at least two snapshots");
    for (const auto& u : snapshots) {
        if (!(u.t > 0.0))
            throw validation_error("fp_compare: snapshots must carry positive time stamps");
        if (u.grid.d != snapshots.front().grid.d)
            throw validation_error("fp_compare: snapshots disagree on dimension");
    }

    std::vector<const WaveField*> order;
    for (const auto& u : snapshots) order.push_back(&u);
    std::sort(order.begin(), order.end(),
              [](const WaveField* a, const WaveField* b) { return a->t < b->t; });

    const double s_lo = dispersion::s_of_t(traj, order.front()->t);
    const double s_hi = dispersion::s_of_t(traj, order.back()->t);
    if (!(s_hi - s_lo >= 1.0))
        throw validation_error("fp_compare: snapshots must span at least one unit of slow time");

    FpReport report;
    report.dictionary = fp_dictionary();
    const int d = snapshots.front().grid.d;
    const double m2_limit = 0.5 * d * rescale::gamma_mass(d);

    for (const WaveField* u : order) {
        WaveField v = rescale::to_v(*u, traj, u0_norm);
        const Grid& gy = v.grid;
        DensityProfile rho = rescale::density_of(v);
        DensityProfile gamma2 = rescale::limit_profile(gy);
        auto mm = rescale::moments(rho);

        FpRow row;
        row.t = u->t;
        row.s = dispersion::s_of_t(traj, u->t);
        double m1sq = 0.0;
        for (int ax = 0; ax < d; ++ax) m1sq += mm.m1[ax] * mm.m1[ax];
        row.m1_gap = std::sqrt(m1sq);
        row.m2_gap = std::fabs(mm.m2 - m2_limit);
        if (d == 1) row.w2 = rescale::wasserstein2_1d(rho, gamma2);
        for (int which = 0; which < 4; ++which) {
            double acc = 0.0;
            for (std::size_t i = 0; i < gy.size(); ++i)
                acc += (rho[i] - gamma2[i]) * dict_value(which, gy, i);
            row.proxies.push_back(acc * gy.cell());
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string fp_report_json(const FpReport& report) {
    nlohmann::json j;
    j["version"] = report.version;
    j["dictionary"] = report.dictionary;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : report.rows) {
        nlohmann::json row;
        row["s"] = r.s;
        row["t"] = r.t;
        row["m1_gap"] = r.m1_gap;
        row["m2_gap"] = r.m2_gap;
        if (r.w2)
            row["w2"] = *r.w2;
        else
            row["w2"] = nullptr;
        row["proxies"] = r.proxies;
        j["rows"].push_back(std::move(row));
    }
    return j.dump(2);
}

FpReport fp_report_parse(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("fp_report_parse: ") + e.what());
    }
    FpReport report;
    try {
        report.version = j.at("version").get<int>();
        report.dictionary = j.at("dictionary").get<std::vector<std::string>>();
        for (const auto& row : j.at("rows")) {
            FpRow r;
            r.s = row.at("s").get<double>();
            r.t = row.at("t").get<double>();
            r.m1_gap = row.at("m1_gap").get<double>();
            r.m2_gap = row.at("m2_gap").get<double>();
            if (!row.at("w2").is_null()) r.w2 = row.at("w2").get<double>();
            r.proxies = row.at("proxies").get<std::vector<double>>();
            report.rows.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("fp_report_parse: ") + e.what());
    }
    return report;
}

} // namespace lognls::fp
