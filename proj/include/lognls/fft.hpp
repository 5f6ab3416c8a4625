#pragma once

#include <complex>
#include <vector>

#include "lognls/grid.hpp"

namespace lognls {

/// Thin FFTW wrapper: rank-d complex transforms on a fixed grid shape.
/// inverse() applies the 1/n^d normalization; inverse_unscaled() leaves it
/// to the caller, which lets tight loops fold it into another multiplier.
/// Not thread-safe.
class Fft {
public:
    explicit Fft(const Grid& g);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    void forward(cplx* data) const;
    void inverse(cplx* data) const;          // normalized
    void inverse_unscaled(cplx* data) const; // caller owns the 1/n^d factor

    const Grid& grid() const { return grid_; }

private:
    Grid grid_;
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
    double norm_ = 1.0;
};

} // namespace lognls
