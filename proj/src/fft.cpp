#include "lognls/fft.hpp"

#include <fftw3.h>

namespace lognls {

Fft::Fft(const Grid& g) : grid_(g) {
    g.validate();
    int dims[3] = {g.n, g.n, g.n};
    // Plan on a scratch buffer: plans may be executed on any other buffer of
    // the same shape and allocator alignment via fftw_execute_dft. Large
    // transforms dominate long runs, so buy the better plan there; the cost
    // is paid once per size per process thanks to FFTW's in-process wisdom.
    std::vector<cplx> scratch(g.size());
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    const unsigned flags = g.size() >= 65536 ? FFTW_MEASURE : FFTW_ESTIMATE;
    plan_fwd_ = fftw_plan_dft(g.d, dims, p, p, FFTW_FORWARD, flags);
    plan_bwd_ = fftw_plan_dft(g.d, dims, p, p, FFTW_BACKWARD, flags);
    norm_ = 1.0 / static_cast<double>(g.size());
}

Fft::~Fft() {
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void Fft::forward(cplx* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), p, p);
}

void Fft::inverse(cplx* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), p, p);
    const std::size_t m = grid_.size();
    for (std::size_t i = 0; i < m; ++i) data[i] *= norm_;
}

void Fft::inverse_unscaled(cplx* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), p, p);
}

} // namespace lognls
