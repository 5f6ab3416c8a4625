#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>

#include "lognls/dispersion.hpp"
#include "lognls/gaussian.hpp"
#include "oracles.hpp"

using namespace lognls;
using namespace lognls::gaussian;

namespace {
constexpr double kPi = 3.14159265358979323846;

GaussianInit init1d(cplx a0, cplx b0 = {1.0, 0.0}, double x0 = 0.0) {
    GaussianInit g;
    g.b0 = b0;
    g.a0 = {a0};
    g.x0 = {x0};
    return g;
}
} // namespace

TEST_CASE("initial state is reproduced exactly") {
    auto traj = evolve_gaussian(init1d({1.0, 1.0}), 1.0, 1.0);
    CHECK(traj.axes[0].r.front() == 1.0);
    CHECK(traj.axes[0].r_dot.front() == -1.0); // r'(0) = -beta0
    CHECK(traj.a(0, 0.0).real() == doctest::Approx(1.0));
    CHECK(traj.a(0, 0.0).imag() == doctest::Approx(1.0));
    CHECK(std::abs(traj.b(0.0) - cplx(1.0, 0.0)) < 1e-14);
}

TEST_CASE("width matches an independent fixed-step integrator") {
    // frozen oracle values: classical RK4 at step 1e-5 on the width equation
    auto t2 = evolve_gaussian(init1d({2.0, 0.0}), 1.0, 100.0, 1e-12);
    CHECK(oracle::sig_digits(t2.axes[0].r_at(100.0), 6.841685865416e2, 6));

    auto tc = evolve_gaussian(init1d({1.0, 1.0}), 1.0, 50.0, 1e-12);
    CHECK(oracle::sig_digits(tc.axes[0].r_at(50.0), 2.146091060769e2, 6));
}

TEST_CASE("accumulated phase integrals match a full oracle run") {
    const double lambda = 1.0, alpha0 = 2.0;
    auto rhs = [=](double, const double* y, double* dy) {
        const double r = y[0];
        dy[0] = y[1];
        dy[1] = alpha0 * alpha0 / (r * r * r) + 2.0 * lambda * alpha0 / r;
        dy[2] = alpha0 / (r * r);   // Re A
        dy[3] = -std::log(r);       // int Im A
    };
    auto ref = oracle::rk4(rhs, 0.0, {1.0, 0.0, 0.0, 0.0}, 10.0, 1e-5);
    auto traj = evolve_gaussian(init1d({2.0, 0.0}), 1.0, 10.0, 1e-12);
    CHECK(oracle::sig_digits(traj.axes[0].reA_at(10.0), ref[2], 8));
    CHECK(oracle::sig_digits(traj.axes[0].intImA_at(10.0), ref[3], 8));
}

TEST_CASE("reconstruct_a closed forms") {
    CHECK(reconstruct_a(1.0, 0.0, 1.0) == cplx(1.0, 0.0));
    CHECK(reconstruct_a(2.0, 0.0, 1.0) == cplx(0.25, 0.0));
    CHECK(reconstruct_a(1.0, -1.0, 1.0) == cplx(1.0, 1.0));
    CHECK_THROWS_AS(reconstruct_a(0.0, 0.0, 1.0), validation_error);
    CHECK_THROWS_AS(reconstruct_a(-1.0, 0.0, 1.0), validation_error);
}

TEST_CASE("first integral and width floor hold at every knot") {
    auto traj = evolve_gaussian(init1d({1.0, 1.0}), 1.0, 100.0, 1e-10);
    const auto& ax = traj.axes[0];
    const double floor = ax.lower_bound(1.0);
    for (std::size_t i = 0; i < ax.t.size(); ++i) {
        const double d = ax.first_integral(ax.r[i], ax.r_dot[i], 1.0);
        CHECK(std::abs(d) <= 10.0 * traj.rel_tol * (1.0 + ax.r_dot[i] * ax.r_dot[i]));
        CHECK(ax.r[i] >= floor * (1.0 - 1e-9));
    }
    CHECK(ax.max_identity_defect < 1e-8); // Im A == -ln r along the run
}

TEST_CASE("modulus of b follows 1/sqrt(prod r)") {
    GaussianInit g;
    g.b0 = cplx(0.5, 0.5);
    g.a0 = {cplx(1.0, 0.0), cplx(2.0, -1.0)};
    auto traj = evolve_gaussian(g, 1.0, 20.0, 1e-12);
    for (double t : {0.0, 0.5, 3.0, 20.0}) {
        const double pred = std::abs(g.b0) /
                            std::sqrt(traj.axes[0].r_at(t) * traj.axes[1].r_at(t));
        CHECK(std::abs(traj.b(t)) == doctest::Approx(pred).epsilon(1e-9));
    }
}

TEST_CASE("mass and energy are conserved along the flow") {
    auto traj = evolve_gaussian(init1d({2.0, 1.0}, {0.8, 0.3}), 1.5, 50.0, 1e-12);
    const double m0 = gaussian_mass(traj, 0.0);
    const double e0 = gaussian_energy(traj, 0.0);
    for (double t : {0.1, 1.0, 7.0, 50.0}) {
        CHECK(gaussian_mass(traj, t) == doctest::Approx(m0).epsilon(1e-8));
        CHECK(gaussian_energy(traj, t) == doctest::Approx(e0).epsilon(1e-7));
    }
}

TEST_CASE("field sampling at t=0 reproduces the datum and its mass") {
    auto traj = evolve_gaussian(init1d({1.0, 0.0}, {1.0, 0.0}, 0.5), 1.0, 1.0);
    Grid grid(1, 512, 20.0);
    auto u = gaussian_field(traj, 0.0, grid);
    double mass = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.coord(i);
        const cplx expect = std::exp(cplx(-0.5 * (x - 0.5) * (x - 0.5), 0.0));
        CHECK(std::abs(u[i] - expect) < 1e-12);
        mass += std::norm(u[i]);
    }
    mass *= grid.h();
    CHECK(mass == doctest::Approx(std::sqrt(kPi)).epsilon(1e-10));
    CHECK(std::sqrt(mass) == doctest::Approx(std::pow(kPi, 0.25)).epsilon(1e-10));
}

TEST_CASE("field modulus follows the width law at later times") {
    auto traj = evolve_gaussian(init1d({1.0, 0.0}), 1.0, 5.0, 1e-12);
    Grid grid(1, 2048, 96.0);
    const double t = 5.0;
    auto u = gaussian_field(traj, t, grid);
    const double r = traj.axes[0].r_at(t);
    const double babs = std::abs(traj.b(t));
    for (int i = 400; i < 1800; i += 37) {
        const double x = grid.coord(i);
        const double expect = babs * std::exp(-0.5 * x * x / (r * r));
        CHECK(std::abs(std::abs(u[i]) - expect) < 1e-12);
    }
}

TEST_CASE("undersized box raises a truncation error") {
    auto traj = evolve_gaussian(init1d({1.0, 0.0}), 1.0, 20.0, 1e-10);
    Grid grid(1, 256, 30.0); // r(20) ~ 70, six sigma far beyond 30
    CHECK_THROWS_AS(gaussian_field(traj, 20.0, grid), resolution_error);
}

TEST_CASE("Lp norms") {
    auto traj = evolve_gaussian(init1d({1.0, 0.0}), 1.0, 1.0);
    CHECK(gaussian_lp_norm(traj, 0.0, 2.0) == doctest::Approx(std::pow(kPi, 0.25)).epsilon(1e-12));
    CHECK(gaussian_lp_norm(traj, 0.0, std::numeric_limits<double>::infinity()) ==
          doctest::Approx(1.0).epsilon(1e-12));

    GaussianInit g2;
    g2.b0 = {1.0, 0.0};
    g2.a0 = {cplx(1.0, 0.0), cplx(1.0, 0.0)};
    auto t2 = evolve_gaussian(g2, 1.0, 1.0);
    CHECK(gaussian_lp_norm(t2, 0.0, 2.0) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-12));

    CHECK_THROWS_AS(gaussian_lp_norm(traj, 0.0, 0.5), validation_error);

    // L2 norm stays equal to the initial mass at later times as well
    CHECK(gaussian_lp_norm(traj, 1.0, 2.0) == doctest::Approx(std::pow(kPi, 0.25)).epsilon(1e-9));
}

TEST_CASE("r_asymptotic closed form, domain, and long-run ratio") {
    const double e2 = std::exp(2.0);
    CHECK(r_asymptotic(e2, 1.0, 2.0) == doctest::Approx(4.0 * e2).epsilon(1e-14));
    CHECK_THROWS_AS(r_asymptotic(std::exp(1.0), 1.0, 1.0), validation_error);

    // alpha0 = 1 coincides with the dilation asymptotic
    CHECK(r_asymptotic(100.0, 1.3, 1.0) ==
          doctest::Approx(dispersion::tau_asymptotic(100.0, 1.3).tau).epsilon(1e-14));

    auto traj = evolve_gaussian(init1d({2.0, 0.0}), 1.0, 1e6, 1e-12);
    for (double t = 1e3; t <= 1e6; t *= 10.0) {
        const double ratio = traj.axes[0].r_at(t) / r_asymptotic(t, 1.0, 2.0);
        CHECK(std::abs(ratio - 1.0) <= 5.0 * dispersion::ell(t));
    }
}

TEST_CASE("gradient norm grows like 2*lambda*d*mass*ln t") {
    auto traj = evolve_gaussian(init1d({1.0, 0.0}), 1.0, 1e6, 1e-12);
    const double mass = gaussian_mass(traj, 0.0);

    // the ratio approaches 1 from above only at rate lnln(t)/ln(t), so test
    // the regression slope over three decades plus the decreasing trend
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    double prev_ratio = 1e300;
    for (double t = 1e3; t <= 1e6; t *= 10.0) {
        const double x = std::log(t);
        const double y = gaussian_grad_sq(traj, t);
        sx += x; sy += y; sxx += x * x; sxy += x * y; ++n;
        const double ratio = y / (2.0 * mass * x);
        CHECK(ratio < prev_ratio);
        CHECK(ratio > 1.0);
        prev_ratio = ratio;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(2.0 * mass).epsilon(0.10));
}

TEST_CASE("Sobolev ratios to (ln t)^{s/2} stay within a narrow band") {
    auto traj = evolve_gaussian(init1d({1.0, 0.0}), 1.0, 1e6, 1e-12);
    for (double s : {0.25, 0.5, 0.75}) {
        double qmin = 1e300, qmax = 0.0;
        for (double t = 1e3; t <= 1e6; t *= 10.0) {
            const double q = gaussian_hs_norm(traj, t, s) / std::pow(std::log(t), 0.5 * s);
            qmin = std::min(qmin, q);
            qmax = std::max(qmax, q);
        }
        CHECK(qmax / qmin < 1.2);
    }
    CHECK_THROWS_AS(gaussian_hs_norm(traj, 1.0, 1.5), validation_error);
    CHECK_THROWS_AS(gaussian_hs_norm(traj, 1.0, 0.0), validation_error);
}

TEST_CASE("Hs norm agrees with direct quadrature in Fourier space at t=0") {
    // for u0 = exp(-x^2/2): |u0^(k)|^2 = e^{-k^2}, so
    // ||u0||_{Hs}^2 = int |k|^{2s} e^{-k^2} dk
    auto traj = evolve_gaussian(init1d({1.0, 0.0}), 1.0, 1.0);
    for (double s : {0.25, 0.5, 1.0}) {
        const double ref = oracle::simpson(
            [s](double k) { return std::pow(std::abs(k), 2.0 * s) * std::exp(-k * k); }, -30.0,
            30.0, 200000);
        // quadrature converges slowly at the |k|^{2s} kink; 1e-5 is enough
        CHECK(gaussian_hs_norm(traj, 0.0, s) == doctest::Approx(std::sqrt(ref)).epsilon(1e-5));
    }
}

TEST_CASE("anisotropic axes evolve independently") {
    GaussianInit g;
    g.b0 = {1.0, 0.0};
    g.a0 = {cplx(2.0, 0.0), cplx(1.0, 0.0)};
    auto t2 = evolve_gaussian(g, 1.0, 10.0, 1e-12);
    auto t1 = evolve_gaussian(init1d({2.0, 0.0}), 1.0, 10.0, 1e-12);
    CHECK(t2.axes[0].r_at(10.0) == doctest::Approx(t1.axes[0].r_at(10.0)).epsilon(1e-10));
    CHECK(t2.axes[1].r_at(10.0) != doctest::Approx(t2.axes[0].r_at(10.0)));
}

TEST_CASE("csv export per axis") {
    auto traj = evolve_gaussian(init1d({1.0, 0.5}), 1.0, 2.0);
    std::ostringstream os;
    traj.write_axis_csv(0, os);
    CHECK(os.str().rfind("t,r,r_dot,first_integral_defect,ReA,ImA\n", 0) == 0);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(evolve_gaussian(init1d({1.0, 0.0}), -1.0, 1.0), validation_error);
    CHECK_THROWS_AS(evolve_gaussian(init1d({1.0, 0.0}, {0.0, 0.0}), 1.0, 1.0), validation_error);
    CHECK_THROWS_AS(evolve_gaussian(init1d({-1.0, 0.0}), 1.0, 1.0), validation_error);
    CHECK_THROWS_AS(evolve_gaussian(init1d({0.0, 1.0}), 1.0, 1.0), validation_error);
    GaussianInit empty;
    empty.a0 = {};
    CHECK_THROWS_AS(evolve_gaussian(empty, 1.0, 1.0), validation_error);
    GaussianInit bad;
    bad.a0 = {cplx(1.0, 0.0)};
    bad.x0 = {0.0, 1.0};
    CHECK_THROWS_AS(evolve_gaussian(bad, 1.0, 1.0), validation_error);
}
