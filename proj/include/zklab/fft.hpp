#ifndef ZKLAB_FFT_HPP
#define ZKLAB_FFT_HPP

#include <complex>
#include <cstring>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

#include "zklab/grid.hpp"

namespace zklab {

// Owns the FFTW plans and aligned buffers for one grid. Plans are created
// with FFTW_ESTIMATE so transforms are bitwise reproducible run to run.
class SpectralWorkspace {
  public:
    explicit SpectralWorkspace(const Grid& g) : grid_(g) {
        rbuf_ = fftw_alloc_real(g.total());
        cbuf_ = fftw_alloc_complex(g.spec_total());
        if (!rbuf_ || !cbuf_) throw std::bad_alloc();
        int n[3] = {g.n[0], g.n[1], g.n[2]};
        fwd_ = fftw_plan_dft_r2c(g.dim, n, rbuf_, cbuf_, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r(g.dim, n, cbuf_, rbuf_, FFTW_ESTIMATE);
        if (!fwd_ || !bwd_) throw std::runtime_error("fftw plan creation failed");
    }
    ~SpectralWorkspace() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(rbuf_);
        fftw_free(cbuf_);
    }
    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    const Grid& grid() const { return grid_; }

    // unnormalized DFT: out_k = sum_x in_x exp(-i k x)
    void forward(const std::vector<double>& in, std::vector<std::complex<double>>& out) {
        if (in.size() != grid_.total()) throw std::invalid_argument("forward: size mismatch");
        std::memcpy(rbuf_, in.data(), in.size() * sizeof(double));
        fftw_execute(fwd_);
        out.resize(grid_.spec_total());
        std::memcpy(out.data(), cbuf_, out.size() * sizeof(std::complex<double>));
    }

    // inverse of forward, including the 1/N normalization
    void backward(const std::vector<std::complex<double>>& in, std::vector<double>& out) {
        if (in.size() != grid_.spec_total()) throw std::invalid_argument("backward: size mismatch");
        std::memcpy(cbuf_, in.data(), in.size() * sizeof(std::complex<double>));
        fftw_execute(bwd_);
        out.resize(grid_.total());
        const double scale = 1.0 / double(grid_.total());
        const double* r = rbuf_;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = r[i] * scale;
    }

  private:
    Grid grid_;
    double* rbuf_;
    fftw_complex* cbuf_;
    fftw_plan fwd_, bwd_;
};

// Real field samples with a lazily maintained spectrum (unnormalized DFT).
class Field {
  public:
    Field() = default;
    explicit Field(const Grid& g) : grid_(g), v_(g.total(), 0.0) {}

    const Grid& grid() const { return grid_; }
    std::vector<double>& values() {
        spec_ok_ = false;
        return v_;
    }
    const std::vector<double>& values() const { return v_; }

    const std::vector<std::complex<double>>& spectrum(SpectralWorkspace& ws) const {
        if (!spec_ok_) {
            ws.forward(v_, spec_);
            spec_ok_ = true;
        }
        return spec_;
    }

    void set_spectrum(SpectralWorkspace& ws, std::vector<std::complex<double>> s) {
        spec_ = std::move(s);
        ws.backward(spec_, v_);
        spec_ok_ = true;
    }

  private:
    Grid grid_;
    std::vector<double> v_;
    mutable std::vector<std::complex<double>> spec_;
    mutable bool spec_ok_ = false;
};

// Spectral partial derivative along one axis.
inline Field derivative(const Field& f, int axis, SpectralWorkspace& ws) {
    const Grid& g = f.grid();
    std::vector<std::complex<double>> s = f.spectrum(ws);
    for_each_mode(g, [&](std::size_t idx, int s0, int s1, int s2) {
        const int sa = axis == 0 ? s0 : (axis == 1 ? s1 : s2);
        // the Nyquist mode has no odd partner; its grid derivative is zero
        if (std::abs(sa) == g.n[axis] / 2) {
            s[idx] = 0.0;
            return;
        }
        s[idx] *= std::complex<double>(0.0, g.wavenumber(axis, sa));
    });
    Field out(g);
    out.set_spectrum(ws, std::move(s));
    return out;
}

// Exact periodic translation by delta (per axis), via phase shift.
inline Field translate(const Field& f, const std::array<double, 3>& delta, SpectralWorkspace& ws) {
    const Grid& g = f.grid();
    std::vector<std::complex<double>> s = f.spectrum(ws);
    for_each_mode(g, [&](std::size_t idx, int s0, int s1, int s2) {
        double phase = 0;
        const int sv[3] = {s0, s1, s2};
        for (int a = 0; a < g.dim; ++a) phase -= g.wavenumber(a, sv[a]) * delta[a];
        s[idx] *= std::exp(std::complex<double>(0.0, phase));
    });
    Field out(g);
    out.set_spectrum(ws, std::move(s));
    return out;
}

// Band-limited resampling onto a finer grid with the same box (zero padding
// in spectral space). Used as the grid-refinement oracle in tests and for
// alias-free quartic products.
inline Field refine(const Field& f, const Grid& fine, SpectralWorkspace& ws_coarse,
                    SpectralWorkspace& ws_fine) {
    const Grid& g = f.grid();
    if (fine.dim != g.dim) throw std::invalid_argument("refine: dimension mismatch");
    for (int a = 0; a < g.dim; ++a)
        if (fine.n[a] < g.n[a] || fine.half_len[a] != g.half_len[a])
            throw std::invalid_argument("refine: target grid must be finer, same box");
    const auto& s = f.spectrum(ws_coarse);
    std::vector<std::complex<double>> sf(fine.spec_total(), 0.0);
    const double amp = double(fine.total()) / double(g.total());
    for_each_mode(g, [&](std::size_t idx, int s0, int s1, int s2) {
        // skip Nyquist planes; they carry no usable signal here
        bool nyq = false;
        const int sv[3] = {s0, s1, s2};
        for (int a = 0; a < g.dim; ++a)
            if (std::abs(sv[a]) == g.n[a] / 2) nyq = true;
        if (nyq) return;
        int fi[3] = {0, 0, 0};
        for (int a = 0; a < g.dim; ++a) fi[a] = sv[a] >= 0 ? sv[a] : sv[a] + fine.n[a];
        std::size_t fidx = 0;
        for (int a = 0; a < fine.dim; ++a) fidx = fidx * fine.spec_n(a) + fi[a];
        sf[fidx] = s[idx] * amp;
    });
    Field out(fine);
    out.set_spectrum(ws_fine, std::move(sf));
    return out;
}

}  // namespace zklab

#endif
