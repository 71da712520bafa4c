#ifndef ZKLAB_QUADRATURE_HPP
#define ZKLAB_QUADRATURE_HPP

#include <complex>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

#include "zklab/fft.hpp"
#include "zklab/grid.hpp"

namespace zklab {

// Weighted integrals of band-limited fields against separable smooth
// weights. Fields enter through their spectrum (products formed on a
// factor-2 padded grid, so quadratic terms are alias-free); each axis weight
// enters through its box Fourier coefficients, computed on a dense auxiliary
// 1D grid. This keeps the bump-function transitions fully resolved no matter
// how coarse the solver grid is. Weights that jump across the periodic seam
// (bounded non-decaying ones like psi or chi) are split against a linear
// ramp whose coefficients are known in closed form.
class SeparableQuadrature {
  public:
    struct AxisWeight {
        std::function<double(double)> fn;  // nullptr means the constant 1
    };

    explicit SeparableQuadrature(const Grid& g) : grid_(g), ws_(g) {
        std::array<int, 3> np = g.n;
        for (int a = 0; a < g.dim; ++a) np[a] *= 2;
        padded_ = Grid::make(g.dim, np, g.half_len);
        wsp_ = std::make_unique<SpectralWorkspace>(padded_);
        fine_buf_ = fftw_alloc_real(kFine);
        fine_spec_ = fftw_alloc_complex(kFine / 2 + 1);
        fine_plan_ = fftw_plan_dft_r2c_1d(kFine, fine_buf_, fine_spec_, FFTW_ESTIMATE);
        if (!fine_plan_) throw std::runtime_error("fftw 1d plan failed");
    }
    ~SeparableQuadrature() {
        fftw_destroy_plan(fine_plan_);
        fftw_free(fine_buf_);
        fftw_free(fine_spec_);
    }
    SeparableQuadrature(const SeparableQuadrature&) = delete;
    SeparableQuadrature& operator=(const SeparableQuadrature&) = delete;

    const Grid& grid() const { return grid_; }
    SpectralWorkspace& workspace() { return ws_; }

    // int u wx wy wz
    double integrate(const Field& u, const AxisWeight& wx, const AxisWeight& wy = {},
                     const AxisWeight& wz = {}) {
        const auto& spec = u.spectrum(ws_);
        return mode_sum(grid_, spec, wx, wy, wz);
    }

    // int (a b) wx wy wz with the product formed alias-free
    double integrate_product(const Field& a, const Field& b, const AxisWeight& wx,
                             const AxisWeight& wy = {}, const AxisWeight& wz = {}) {
        pad_to(a, pa_);
        if (&a == &b) {
            for (double& v : pa_) v *= v;
        } else {
            pad_to(b, pb_);
            for (std::size_t i = 0; i < pa_.size(); ++i) pa_[i] *= pb_[i];
        }
        wsp_->forward(pa_, pspec_);
        return mode_sum(padded_, pspec_, wx, wy, wz);
    }

    double integrate_square(const Field& u, const AxisWeight& wx, const AxisWeight& wy = {},
                            const AxisWeight& wz = {}) {
        return integrate_product(u, u, wx, wy, wz);
    }

    // int u^3 wx wy wz (alias-free up to the padded edge bin for 2/3-band input)
    double integrate_cube(const Field& u, const AxisWeight& wx, const AxisWeight& wy = {},
                          const AxisWeight& wz = {}) {
        pad_to(u, pa_);
        for (double& v : pa_) v = v * v * v;
        wsp_->forward(pa_, pspec_);
        return mode_sum(padded_, pspec_, wx, wy, wz);
    }

    // Box coefficients A(s) = int_{-L}^{L} w(x) exp(i pi s (x + L) / L) dx,
    // s = 0..nmax; negative s follow by conjugation.
    std::vector<std::complex<double>> axis_transform(double L, const AxisWeight& w, int nmax) {
        std::vector<std::complex<double>> A(nmax + 1, 0.0);
        if (!w.fn) {
            A[0] = 2.0 * L;
            return A;
        }
        const double hf = 2.0 * L / kFine;
        const double jump = w.fn(-L) - w.fn(L);
        for (int m = 0; m < kFine; ++m) {
            const double x = -L + m * hf;
            fine_buf_[m] = w.fn(x) - jump * (L - x) / (2.0 * L);
        }
        fftw_execute(fine_plan_);
        for (int s = 0; s <= nmax; ++s) {
            const std::complex<double> r(fine_spec_[s][0], fine_spec_[s][1]);
            // ramp coefficients: L at s = 0, i L / (pi s) otherwise
            A[s] = hf * std::conj(r) +
                   jump * (s == 0 ? std::complex<double>(L, 0.0)
                                  : std::complex<double>(0.0, L / (M_PI * s)));
        }
        return A;
    }

  private:
    static constexpr int kFine = 1 << 16;

    void pad_to(const Field& u, std::vector<double>& out) {
        const auto& s = u.spectrum(ws_);
        pspec_.assign(padded_.spec_total(), 0.0);
        const double amp = double(padded_.total()) / double(grid_.total());
        for_each_mode(grid_, [&](std::size_t idx, int s0, int s1, int s2) {
            const int sv[3] = {s0, s1, s2};
            for (int a = 0; a < grid_.dim; ++a)
                if (std::abs(sv[a]) == grid_.n[a] / 2) return;  // skip Nyquist planes
            int fi[3] = {0, 0, 0};
            for (int a = 0; a < grid_.dim; ++a)
                fi[a] = sv[a] >= 0 ? sv[a] : sv[a] + padded_.n[a];
            std::size_t fidx = 0;
            for (int a = 0; a < padded_.dim; ++a) fidx = fidx * padded_.spec_n(a) + fi[a];
            pspec_[fidx] = s[idx] * amp;
        });
        wsp_->backward(pspec_, out);
    }

    double mode_sum(const Grid& g, const std::vector<std::complex<double>>& spec,
                    const AxisWeight& wx, const AxisWeight& wy, const AxisWeight& wz) {
        const AxisWeight* w[3] = {&wx, &wy, &wz};
        std::vector<std::vector<std::complex<double>>> A(g.dim);
        for (int a = 0; a < g.dim; ++a) A[a] = axis_transform(g.half_len[a], *w[a], g.n[a] / 2);
        const double inv_n = 1.0 / double(g.total());
        const int last = g.last_axis();
        double total = 0;
        for_each_mode(g, [&](std::size_t idx, int s0, int s1, int s2) {
            const int sv[3] = {s0, s1, s2};
            std::complex<double> prod = spec[idx];
            for (int a = 0; a < g.dim; ++a) {
                const int s = sv[a];
                prod *= s >= 0 ? A[a][s] : std::conj(A[a][-s]);
            }
            const double mult = (sv[last] == 0 || sv[last] == g.n[last] / 2) ? 1.0 : 2.0;
            total += mult * prod.real();
        });
        return total * inv_n;
    }

    Grid grid_, padded_;
    SpectralWorkspace ws_;
    std::unique_ptr<SpectralWorkspace> wsp_;
    double* fine_buf_;
    fftw_complex* fine_spec_;
    fftw_plan fine_plan_;
    std::vector<double> pa_, pb_;
    std::vector<std::complex<double>> pspec_;
};

}  // namespace zklab

#endif
