#pragma once

#include <cstddef>

#include "lognls/grid.hpp"

namespace lognls::pde::detail {

// In-place rotation z <- z * exp(-i * (a*ln(eps+|z|^2) + b*|z|^2)); the
// pointwise log/sincos loop dominates large time steps, so this lives in a
// translation unit built with the vector-math flags. b = 0 gives the pure
// log model, nonzero b the cubic power term.
void phase_rotate_log_cubic(cplx* z, std::size_t n, double a, double eps, double b);

// Same with a general power term b*|z|^{2 sigma}.
void phase_rotate_log_pow(cplx* z, std::size_t n, double a, double eps, double b,
                          double sigma);

} // namespace lognls::pde::detail
