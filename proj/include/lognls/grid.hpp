#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "lognls/errors.hpp"

namespace lognls {

using cplx = std::complex<double>;

/// Uniform periodic grid on [-L, L)^d with n points per axis.
/// Wavenumbers are k = pi*m/L for integer m in [-n/2, n/2).
struct Grid {
    int d = 1;
    int n = 0;      // points per axis, power of two, >= 16
    double L = 0.0; // half-width of the box

    Grid() = default;
    Grid(int d_, int n_, double L_) : d(d_), n(n_), L(L_) { validate(); }

    void validate() const {
        if (d < 1 || d > 3)
            throw validation_error("grid: dimension must be 1, 2 or 3");
        if (n < 16 || (n & (n - 1)) != 0)
            throw validation_error("grid: points per axis must be a power of two >= 16");
        if (!(L > 0.0))
            throw validation_error("grid: box half-width must be positive");
    }

    double h() const { return 2.0 * L / n; }
    std::size_t size() const {
        std::size_t s = 1;
        for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(n);
        return s;
    }
    /// Cell volume h^d, the quadrature weight for grid sums.
    double cell() const {
        double w = 1.0;
        for (int i = 0; i < d; ++i) w *= h();
        return w;
    }

    double coord(int j) const { return -L + j * h(); }

    /// Signed integer mode for FFT bin j (0..n-1).
    int mode(int j) const { return j < n / 2 ? j : j - n; }
    double wavenumber(int j) const {
        constexpr double pi = 3.14159265358979323846;
        return pi * mode(j) / L;
    }

    bool operator==(const Grid& o) const { return d == o.d && n == o.n && L == o.L; }
};

/// Complex field sampled on a Grid, row-major (last axis fastest).
struct WaveField {
    Grid grid;
    std::vector<cplx> data;
    double t = 0.0; // time the samples belong to

    WaveField() = default;
    explicit WaveField(const Grid& g) : grid(g), data(g.size(), cplx(0.0, 0.0)) {}

    cplx& operator[](std::size_t i) { return data[i]; }
    const cplx& operator[](std::size_t i) const { return data[i]; }
    std::size_t size() const { return data.size(); }
};

/// Nonnegative scalar density on a Grid (same layout as WaveField).
struct DensityProfile {
    Grid grid;
    std::vector<double> data;

    DensityProfile() = default;
    explicit DensityProfile(const Grid& g) : grid(g), data(g.size(), 0.0) {}

    double& operator[](std::size_t i) { return data[i]; }
    const double& operator[](std::size_t i) const { return data[i]; }
    std::size_t size() const { return data.size(); }

    double mass() const {
        double s = 0.0;
        for (double v : data) s += v;
        return s * grid.cell();
    }
};

/// Decompose flat row-major index into per-axis indices j[0..d).
inline void unravel(const Grid& g, std::size_t idx, int j[3]) {
    j[0] = j[1] = j[2] = 0;
    for (int ax = g.d - 1; ax >= 0; --ax) {
        j[ax] = static_cast<int>(idx % g.n);
        idx /= g.n;
    }
}

} // namespace lognls
