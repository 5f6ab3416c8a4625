#include "lognls/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "lognls/dispersion.hpp"
#include "lognls/errors.hpp"
#include "lognls/fokker_planck.hpp"
#include "lognls/gaussian.hpp"
#include "lognls/io.hpp"
#include "lognls/rescale.hpp"
#include "lognls/solver.hpp"
#include "lognls/svg.hpp"

namespace fs = std::filesystem;

namespace lognls::driver {
namespace {

using nlohmann::json;

constexpr double kE = 2.71828182845904523536;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Check {
    std::string name;
    bool passed;
    double value;
    double bound;
};

/// Shared pipeline state: resolved output directory, files written so far
/// (for cleanup on failure), accumulated checks and summary fragments.
struct Ctx {
    const cfg::ExperimentConfig& cfg;
    std::string dir;
    std::vector<std::string> written;
    std::vector<Check> checks;
    json extra = json::object();

    bool wants(const std::string& fmt) const {
        const auto& f = cfg.output.formats;
        return std::find(f.begin(), f.end(), fmt) != f.end();
    }

    std::string join(const std::string& rel) const { return dir + "/" + rel; }

    void emit(const std::string& rel, const std::string& bytes) {
        const std::string path = join(rel);
        io::write_file_atomic(path, bytes);
        written.push_back(path);
    }

    void emit_field(const std::string& rel, const WaveField& u) {
        const std::string path = join(rel);
        io::write_snapshot(path, u, cfg.model);
        written.push_back(path);
        written.push_back(path + ".json");
    }

    void check(const std::string& name, double value, double bound) {
        checks.push_back({name, value <= bound, value, bound});
    }

    void plot(const std::string& rel, const std::string& csv_text, const svg::PlotSpec& spec) {
        if (wants("svg")) emit(rel, svg::render_line_plot(csv_text, spec));
    }
};

std::vector<double> log_times(double t0, double t1, int count) {
    std::vector<double> out;
    const double ratio = std::pow(t1 / t0, 1.0 / (count - 1));
    double t = t0;
    for (int i = 0; i < count; ++i, t *= ratio) out.push_back(t);
    out.back() = t1;
    return out;
}

/// Initial datum b0 * prod_j exp(-a0[j] (x_j - x0[j])^2 / 2) sampled
/// directly (no trajectory needed, so focusing lambda is fine here).
WaveField sample_initial(const cfg::ExperimentConfig& c, const Grid& g) {
    const auto& init = c.init;
    for (int axis = 0; axis < g.d; ++axis) {
        const double w = 1.0 / std::sqrt(init.a0[axis].real());
        const double x0 = init.x0[axis];
        if (x0 - 6.0 * w < -g.L || x0 + 6.0 * w > g.L)
            throw resolution_error("initial datum: box does not cover six standard "
                                   "deviations of the modulus on axis " +
                                   std::to_string(axis));
    }
    WaveField u(g);
    int jj[3];
    for (std::size_t idx = 0; idx < u.size(); ++idx) {
        unravel(g, idx, jj);
        cplx arg = 0.0;
        for (int axis = 0; axis < g.d; ++axis) {
            const double dx = g.coord(jj[axis]) - init.x0[axis];
            arg += 0.5 * init.a0[axis] * dx * dx;
        }
        u[idx] = init.b0 * std::exp(-arg);
    }
    return u;
}

json diag_json(const pde::DiagRow& row, int d) {
    json j;
    j["t"] = row.t;
    j["mass"] = row.obs.mass;
    j["energy"] = row.obs.energy;
    j["energy_reg"] = row.obs.energy_reg;
    json mom = json::array();
    for (int axis = 0; axis < d; ++axis) mom.push_back(row.obs.momentum[axis]);
    j["momentum"] = mom;
    return j;
}

void conservation_checks(Ctx& ctx, const std::vector<pde::DiagRow>& rows, int d) {
    const auto& first = rows.front().obs;
    double mass_drift = 0.0, energy_drift = 0.0, momentum_drift = 0.0;
    for (const auto& row : rows) {
        mass_drift = std::max(mass_drift, std::abs(row.obs.mass - first.mass));
        energy_drift = std::max(energy_drift, std::abs(row.obs.energy_reg - first.energy_reg));
        for (int axis = 0; axis < d; ++axis)
            momentum_drift =
                std::max(momentum_drift, std::abs(row.obs.momentum[axis] - first.momentum[axis]));
    }
    ctx.check("mass_drift_rel", mass_drift / first.mass, 1e-9);
    ctx.check("energy_reg_drift_rel",
              energy_drift / std::max(std::abs(first.energy_reg), 1e-12), 1e-4);
    ctx.check("momentum_drift_per_mass", momentum_drift / first.mass, 1e-7);
}

/// Rows of run() that correspond to the requested snapshot times (the run
/// also emits both endpoints; those stay out unless the user asked for them).
std::vector<std::size_t> requested_rows(const std::vector<pde::DiagRow>& rows,
                                        const std::vector<double>& wanted) {
    std::vector<std::size_t> picked;
    for (double ts : wanted) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (std::abs(rows[i].t - ts) < std::abs(rows[best].t - ts)) best = i;
        if (picked.empty() || picked.back() != best) picked.push_back(best);
    }
    return picked;
}

// ---- pipelines ------------------------------------------------------------

void run_asymptotics(Ctx& ctx) {
    const auto& c = ctx.cfg;
    const auto traj = dispersion::solve_tau(c.model.lambda, c.times.t_end, c.rel_tol);

    std::vector<double> times = c.times.snapshots;
    if (times.empty()) times = log_times(kE * kE, c.times.t_end, 121);
    for (double t : times)
        if (t <= kE)
            throw validation_error("asymptotics: sampled times must exceed e, got " + fmt17(t));

    std::ostringstream csv;
    csv << "t,tau,ratio,ell\n";
    double max_defect = 0.0;
    double final_ratio = 0.0, final_ell = 0.0;
    for (double t : times) {
        const double tau = traj.tau_at(t);
        const double ratio = tau / dispersion::tau_asymptotic(t, c.model.lambda).tau;
        const double l = dispersion::ell(t);
        max_defect = std::max(max_defect, std::abs(traj.first_integral_defect(t)));
        csv << fmt17(t) << ',' << fmt17(tau) << ',' << fmt17(ratio) << ',' << fmt17(l) << "\n";
        final_ratio = ratio;
        final_ell = l;
    }
    if (ctx.wants("csv")) ctx.emit("dispersion.csv", csv.str());
    ctx.plot("dispersion.svg", csv.str(), {"t", "tau", true, true, "dilation factor"});

    ctx.check("final_ratio_gap", std::abs(final_ratio - 1.0), 5.0 * final_ell);
    ctx.check("first_integral_defect", max_defect, 100.0 * c.rel_tol);
    ctx.extra["final"] = {{"t", times.back()},
                          {"tau", traj.tau_at(times.back())},
                          {"ratio", final_ratio},
                          {"ell", final_ell}};
}

void run_gaussian_ode(Ctx& ctx) {
    const auto& c = ctx.cfg;
    const auto traj = gaussian::evolve_gaussian(c.init, c.model.lambda, c.times.t_end, c.rel_tol);

    double max_defect = 0.0;
    json axes = json::array();
    for (int axis = 0; axis < traj.dim(); ++axis) {
        const auto& track = traj.axes[axis];
        for (std::size_t i = 0; i < track.t.size(); ++i)
            max_defect = std::max(
                max_defect,
                std::abs(track.first_integral(track.r[i], track.r_dot[i], c.model.lambda)));
        if (ctx.wants("csv")) {
            std::ostringstream csv;
            traj.write_axis_csv(axis, csv);
            ctx.emit("axis_" + std::to_string(axis) + ".csv", csv.str());
        }
        axes.push_back({{"r", track.r_at(c.times.t_end)},
                        {"r_dot", track.r_dot_at(c.times.t_end)},
                        {"corrections", track.corrections}});
    }
    ctx.check("first_integral_defect", max_defect, 100.0 * c.rel_tol);
    ctx.extra["axes"] = axes;

    // kinetic-growth regression ||grad u||^2 ~ slope * ln t over the last
    // three decades; only meaningful well past t = e
    if (c.times.t_end >= 1e4) {
        std::vector<double> lx, ly;
        for (double t : log_times(c.times.t_end / 1e3, c.times.t_end, 13)) {
            lx.push_back(std::log(t));
            ly.push_back(gaussian::gaussian_grad_sq(traj, t));
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(lx.size());
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sx += lx[i];
            sy += ly[i];
            sxx += lx[i] * lx[i];
            sxy += lx[i] * ly[i];
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double target =
            2.0 * c.model.lambda * traj.dim() * gaussian::gaussian_mass(traj, 0.0);
        ctx.checks.push_back({"kinetic_growth_slope",
                              std::abs(slope / target - 1.0) <= 0.10, slope, target});
        ctx.extra["kinetic_growth"] = {{"slope", slope}, {"target", target}};
    }

    if (ctx.wants("svg")) {
        std::ostringstream csv;
        traj.write_axis_csv(0, csv);
        ctx.plot("width.svg", csv.str(), {"t", "r", true, true, "axis 0 width"});
    }
}

void run_pde(Ctx& ctx) {
    const auto& c = ctx.cfg;
    const Grid g(c.grid_d, c.grid_n, c.grid_L);
    WaveField u;
    if (!c.field_file.empty()) {
        auto [field, params] = io::read_snapshot(c.field_file);
        (void)params; // the config's model governs the run
        if (!(field.grid == g))
            throw validation_error("pde: snapshot grid does not match the [grid] section");
        u = std::move(field);
    } else {
        u = sample_initial(c, g);
    }
    if (u.t >= c.times.t_end)
        throw validation_error("pde: initial time " + fmt17(u.t) + " is past t_end");

    const Fft fft(g);
    pde::RunSchedule sched;
    sched.dt = c.times.dt;
    sched.t_start = u.t;
    sched.t_end = c.times.t_end;
    sched.snapshots = c.times.snapshots;

    int snap_index = 0;
    pde::SnapshotFn on_snapshot;
    if (c.output.field_snapshots)
        on_snapshot = [&](double, const WaveField& field) {
            char name[48];
            std::snprintf(name, sizeof name, "fields/snapshot_%03d.f64", snap_index++);
            ctx.emit_field(name, field);
        };

    const auto rows = pde::run(fft, u, c.model, sched, on_snapshot);

    std::ostringstream csv;
    io::write_diagnostics_csv(rows, g.d, csv);
    if (ctx.wants("csv")) ctx.emit("diagnostics.csv", csv.str());
    ctx.plot("energy.svg", csv.str(), {"t", "E_reg", false, false, "regularized energy"});

    conservation_checks(ctx, rows, g.d);
    ctx.extra["initial"] = diag_json(rows.front(), g.d);
    if (!c.times.snapshots.empty()) {
        json snaps = json::array();
        for (std::size_t i : requested_rows(rows, c.times.snapshots))
            snaps.push_back(diag_json(rows[i], g.d));
        ctx.extra["snapshots"] = snaps;
    }
}

void run_compare(Ctx& ctx) {
    const auto& c = ctx.cfg;
    if (c.model.mu != 0.0)
        throw validation_error("compare: the closed form requires mu = 0");
    const Grid g(c.grid_d, c.grid_n, c.grid_L);
    const auto traj = gaussian::evolve_gaussian(c.init, c.model.lambda, c.times.t_end, c.rel_tol);
    WaveField u = gaussian::gaussian_field(traj, 0.0, g);

    const Fft fft(g);
    pde::RunSchedule sched;
    sched.dt = c.times.dt;
    sched.t_end = c.times.t_end;
    sched.snapshots = c.times.snapshots;

    std::vector<std::pair<double, double>> errors;
    const auto rows = pde::run(fft, u, c.model, sched, [&](double t, const WaveField& field) {
        const WaveField exact = gaussian::gaussian_field(traj, t, g);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < field.size(); ++i) {
            num += std::norm(field[i] - exact[i]);
            den += std::norm(exact[i]);
        }
        errors.emplace_back(t, std::sqrt(num / den));
    });

    std::ostringstream diag_csv;
    io::write_diagnostics_csv(rows, g.d, diag_csv);
    std::ostringstream err_csv;
    err_csv << "t,l2_error\n";
    for (const auto& [t, e] : errors) err_csv << fmt17(t) << ',' << fmt17(e) << "\n";
    if (ctx.wants("csv")) {
        ctx.emit("diagnostics.csv", diag_csv.str());
        ctx.emit("error.csv", err_csv.str());
    }
    ctx.plot("error.svg", err_csv.str(), {"t", "l2_error", false, true, "closed-form gap"});

    ctx.check("final_l2_error", errors.back().second, c.compare_tol);
    conservation_checks(ctx, rows, g.d);
    json err_json = json::array();
    for (const auto& [t, e] : errors) err_json.push_back({{"t", t}, {"l2_error", e}});
    ctx.extra["l2_error"] = err_json;
}

void run_fp(Ctx& ctx) {
    const auto& c = ctx.cfg;
    if (c.times.snapshots.size() < 2)
        throw validation_error("fp: need at least two snapshot times");
    const auto tau_traj = dispersion::solve_tau(c.model.lambda, c.times.t_end, c.rel_tol);
    const auto gtraj = gaussian::evolve_gaussian(c.init, c.model.lambda, c.times.t_end, c.rel_tol);
    const double u0_norm = std::sqrt(gaussian::gaussian_mass(gtraj, 0.0));

    std::vector<WaveField> snaps;
    for (double t : c.times.snapshots) {
        const double box = c.grid_L * std::max(1.0, tau_traj.tau_at(t));
        snaps.push_back(gaussian::gaussian_field(gtraj, t, Grid(c.grid_d, c.grid_n, box)));
    }
    const auto report = fp::fp_compare(snaps, tau_traj, u0_norm);
    ctx.emit("fp_report.json", fp::fp_report_json(report));

    std::ostringstream csv;
    csv << "s,t,m1_gap,m2_gap,w2";
    for (const auto& name : report.dictionary) csv << ",proxy_" << name;
    csv << "\n";
    for (const auto& row : report.rows) {
        csv << fmt17(row.s) << ',' << fmt17(row.t) << ',' << fmt17(row.m1_gap) << ','
            << fmt17(row.m2_gap) << ',';
        if (row.w2) csv << fmt17(*row.w2);
        for (double p : row.proxies) csv << ',' << fmt17(p);
        csv << "\n";
    }
    if (ctx.wants("csv")) ctx.emit("fp_rows.csv", csv.str());
    ctx.plot("fp_trend.svg", csv.str(), {"s", "m2_gap", false, true, "second-moment gap"});

    // every declared weak-convergence measure must shrink monotonically
    auto trend = [&](const std::string& name, auto getter) {
        bool mono = true;
        double prev = std::abs(getter(report.rows.front()));
        for (std::size_t i = 1; i < report.rows.size(); ++i) {
            const double cur = std::abs(getter(report.rows[i]));
            if (cur > prev + 1e-12) mono = false;
            prev = cur;
        }
        const double first = std::abs(getter(report.rows.front()));
        const double last = std::abs(getter(report.rows.back()));
        ctx.checks.push_back({"trend_" + name, mono && last < first, last, first});
    };
    trend("m1_gap", [](const fp::FpRow& r) { return r.m1_gap; });
    trend("m2_gap", [](const fp::FpRow& r) { return r.m2_gap; });
    if (report.rows.front().w2)
        trend("w2", [](const fp::FpRow& r) { return *r.w2; });
    for (std::size_t k = 0; k < report.dictionary.size(); ++k)
        trend("proxy_" + report.dictionary[k],
              [k](const fp::FpRow& r) { return r.proxies[k]; });
}

} // namespace

ExperimentResult run_experiment(const cfg::ExperimentConfig& cfg,
                                const std::string& output_root) {
    ExperimentResult result;
    Ctx ctx{cfg, output_root.empty() ? cfg.output.dir : output_root + "/" + cfg.output.dir,
            {}, {}, json::object()};

    json summary;
    summary["schema_version"] = 1;
    summary["kind"] = cfg::kind_name(cfg.kind);

    std::string status = "ok";
    json error = json::object();
    try {
        std::error_code ec;
        fs::create_directories(ctx.dir, ec);
        if (ec) throw validation_error("output directory " + ctx.dir + ": " + ec.message());
        switch (cfg.kind) {
            case cfg::Kind::asymptotics: run_asymptotics(ctx); break;
            case cfg::Kind::gaussian_ode: run_gaussian_ode(ctx); break;
            case cfg::Kind::pde: run_pde(ctx); break;
            case cfg::Kind::compare: run_compare(ctx); break;
            case cfg::Kind::fp: run_fp(ctx); break;
        }
    } catch (const validation_error& e) {
        status = "validation_error";
        error["message"] = e.what();
        result.exit_code = 2;
    } catch (const std::exception& e) {
        status = "numerical_error";
        error["message"] = e.what();
        result.exit_code = 3;
    }

    json checks = json::array();
    bool all_passed = true;
    for (const auto& c : ctx.checks) {
        checks.push_back(
            {{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"bound", c.bound}});
        all_passed = all_passed && c.passed;
    }
    summary["checks"] = checks;
    if (status == "ok" && !all_passed) {
        status = "check_failed";
        result.exit_code = 3;
    }
    summary["status"] = status;
    for (auto& [key, value] : ctx.extra.items()) summary[key] = value;

    if (result.exit_code == 0 || status == "check_failed") {
        // failed checks still describe a completed run; keep its outputs
        if (ctx.wants("json")) {
            summary["outputs"] = json::array();
            for (const auto& p : ctx.written) summary["outputs"].push_back(p);
            summary["outputs"].push_back(ctx.join("summary.json"));
            ctx.emit("summary.json", summary.dump(2) + "\n");
        } else {
            summary["outputs"] = ctx.written;
        }
        result.outputs = ctx.written;
    } else {
        // errored runs leave nothing behind
        summary["error"] = error;
        std::error_code ec;
        for (const auto& path : ctx.written) fs::remove(path, ec);
    }
    result.summary_json = summary.dump(2) + "\n";
    return result;
}

} // namespace lognls::driver
