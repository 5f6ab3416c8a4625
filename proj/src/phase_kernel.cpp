// Hot pointwise loops of the split-step integrator. This file is compiled
// with fast-math vectorization flags (see src/CMakeLists.txt) so the libm
// calls map onto SIMD implementations; everything here assumes finite
// inputs — the solver's runaway guard runs in a strictly-compiled unit.
#include "phase_kernel.hpp"

#include <cmath>

namespace lognls::pde::detail {

void phase_rotate_log_cubic(cplx* z, std::size_t n, double a, double eps, double b) {
    double* p = reinterpret_cast<double*>(z);
    for (std::size_t i = 0; i < n; ++i) {
        const double re = p[2 * i], im = p[2 * i + 1];
        const double rho = re * re + im * im;
        const double phi = -(a * std::log(eps + rho) + b * rho);
        const double c = std::cos(phi), s = std::sin(phi);
        p[2 * i] = re * c - im * s;
        p[2 * i + 1] = re * s + im * c;
    }
}

void phase_rotate_log_pow(cplx* z, std::size_t n, double a, double eps, double b,
                          double sigma) {
    double* p = reinterpret_cast<double*>(z);
    for (std::size_t i = 0; i < n; ++i) {
        const double re = p[2 * i], im = p[2 * i + 1];
        const double rho = re * re + im * im;
        const double phi = -(a * std::log(eps + rho) + b * std::pow(rho, sigma));
        const double c = std::cos(phi), s = std::sin(phi);
        p[2 * i] = re * c - im * s;
        p[2 * i + 1] = re * s + im * c;
    }
}

} // namespace lognls::pde::detail
